#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <unistd.h>

#include "mmtab/error.hpp"

namespace mmtab {

struct PixelSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const PixelSize&, const PixelSize&) = default;
};

/// Pixel size of a `width` x `height` (CSS pixel) drawing at `dpi`.
inline PixelSize raster_size(int width, int height, int dpi) {
  auto scale = [dpi](int v) {
    return static_cast<int>((static_cast<long long>(v) * dpi + 95) / 96);
  };
  return {scale(width), scale(height)};
}

/// Reads the width/height attributes of the root <svg> element.
inline PixelSize svg_size(std::string_view svg) {
  static const std::regex kRoot(R"re(<svg[^>]*?\swidth="(\d+)"[^>]*?\sheight="(\d+)")re");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(svg.begin(), svg.end(), m, kRoot)) throw RasterizerError("svg has no integer width/height");
  return {std::stoi(m[1].str()), std::stoi(m[2].str())};
}

/// Dimensions from a PNG IHDR chunk.
inline PixelSize png_size(std::string_view png) {
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (png.size() < 24) throw RasterizerError("output is not a PNG image");
  for (int i = 0; i < 8; ++i)
    if (static_cast<unsigned char>(png[static_cast<std::size_t>(i)]) != kSig[i])
      throw RasterizerError("output is not a PNG image");
  auto be32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(png[at + i]);
    return static_cast<int>(v);
  };
  return {be32(16), be32(20)};
}

/// Backend that turns an SVG document into PNG bytes of an exact size.
class Rasterizer {
 public:
  virtual ~Rasterizer() = default;
  virtual std::string rasterize(std::string_view svg, PixelSize size, int dpi) = 0;
  /// Whether rasterize() may be called from several threads at once.
  virtual bool concurrent_safe() const { return false; }
};

/// Shells out to an external converter. The command template may reference
/// {input}, {output}, {dpi}, {width} and {height}.
class CommandRasterizer : public Rasterizer {
 public:
  explicit CommandRasterizer(std::string command_template, bool concurrent = false)
      : template_(std::move(command_template)), concurrent_(concurrent) {}

  std::string rasterize(std::string_view svg, PixelSize size, int dpi) override {
    std::unique_lock<std::mutex> lock(mutex_, std::defer_lock);
    if (!concurrent_) lock.lock();

    namespace fs = std::filesystem;
    static std::atomic<unsigned long> counter{0};
    const fs::path dir = fs::temp_directory_path();
    const std::string stem = "mmtab-raster-" + std::to_string(::getpid()) + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
                             std::to_string(counter.fetch_add(1));
    const fs::path in = dir / (stem + ".svg");
    const fs::path out = dir / (stem + ".png");
    {
      std::ofstream f(in, std::ios::binary);
      f.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    }
    std::string cmd = template_;
    auto replace_all = [&](std::string_view key, const std::string& value) {
      for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size()))
        cmd.replace(p, key.size(), value);
    };
    replace_all("{input}", in.string());
    replace_all("{output}", out.string());
    replace_all("{dpi}", std::to_string(dpi));
    replace_all("{width}", std::to_string(size.width));
    replace_all("{height}", std::to_string(size.height));

    const int rc = std::system(cmd.c_str());
    std::error_code ec;
    fs::remove(in, ec);
    if (rc != 0) {
      fs::remove(out, ec);
      throw RasterizerError("rasterizer command failed (" + std::to_string(rc) + "): " + cmd);
    }
    std::ifstream f(out, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    f.close();
    fs::remove(out, ec);
    return ss.str();
  }

  bool concurrent_safe() const override { return concurrent_; }

 private:
  std::string template_;
  bool concurrent_;
  std::mutex mutex_;
};

/// Rasterizes `svg` at `dpi`; the image is ceil(svg size * dpi / 96) pixels.
inline std::string rasterize(std::string_view svg, int dpi, Rasterizer* backend) {
  if (!backend) throw RasterizerUnavailable("no rasterizer backend configured");
  if (dpi <= 0) throw RasterizerError("dpi must be positive");
  const PixelSize target = [&] {
    PixelSize s = svg_size(svg);
    return raster_size(s.width, s.height, dpi);
  }();
  std::string png = backend->rasterize(svg, target, dpi);
  if (png_size(png) != target) throw RasterizerError("rasterizer produced an image of the wrong size");
  return png;
}

}  // namespace mmtab

#include <gtest/gtest.h>

#include "mmtab/raster.hpp"
#include "mmtab/render.hpp"

using namespace mmtab;

namespace {

const std::string kScript = std::string(MMTAB_TEST_SUPPORT) + "/blank_png.py";

bool have_pillow() { return std::system("python3 -c 'import PIL' >/dev/null 2>&1") == 0; }

}  // namespace

TEST(RasterSize, ScalesFromCssPixels) {
  EXPECT_EQ(raster_size(100, 50, 96), (PixelSize{100, 50}));
  EXPECT_EQ(raster_size(100, 50, 192), (PixelSize{200, 100}));
  EXPECT_EQ(raster_size(101, 33, 144), (PixelSize{152, 50}));
  EXPECT_EQ(raster_size(1, 1, 72), (PixelSize{1, 1}));
}

TEST(RasterSize, ReadsSvgRoot) {
  Table t;
  t.anchors = {AnchorCell{1, 1, 1, 1, "x", false}};
  const std::string svg = render_svg(t, StyleSpec{});
  const LayoutPlan p = layout(t, StyleSpec{});
  EXPECT_EQ(svg_size(svg), (PixelSize{p.width, p.height}));
  EXPECT_THROW(svg_size("<svg/>"), RasterizerError);
}

TEST(Rasterize, NoBackendIsUnavailable) {
  EXPECT_THROW(rasterize("<svg width=\"1\" height=\"1\"/>", 96, nullptr), RasterizerUnavailable);
}

TEST(Rasterize, FailingCommandRaises) {
  CommandRasterizer r("false");
  EXPECT_THROW(rasterize("<svg width=\"10\" height=\"10\"/>", 96, &r), RasterizerError);
}

TEST(Rasterize, WrongSizeRaises) {
  if (!have_pillow()) GTEST_SKIP() << "Pillow not installed";
  CommandRasterizer r("python3 " + kScript + " {output} 3 3");
  EXPECT_THROW(rasterize("<svg width=\"10\" height=\"10\"/>", 96, &r), RasterizerError);
}

TEST(Rasterize, CommandBackendProducesTargetSize) {
  if (!have_pillow()) GTEST_SKIP() << "Pillow not installed";
  CommandRasterizer r("python3 " + kScript + " {output} {width} {height}");
  Table t;
  t.n_rows = 1;
  t.n_cols = 2;
  t.anchors = {AnchorCell{1, 1, 1, 1, "a", true}, AnchorCell{1, 2, 1, 1, "b", false}};
  const std::string svg = render_svg(t, StyleSpec{});
  for (int dpi : {96, 192}) {
    const std::string png = rasterize(svg, dpi, &r);
    const PixelSize want = raster_size(svg_size(svg).width, svg_size(svg).height, dpi);
    EXPECT_EQ(png_size(png), want);
  }
}

TEST(PngSize, RejectsNonPng) { EXPECT_THROW(png_size("not a png at all, definitely"), RasterizerError); }

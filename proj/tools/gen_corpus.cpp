// gen_corpus: writes a deterministic corpus of random tables in mixed
// formats, for smoke runs and timing of the synth pipeline.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "corpus.hpp"

using namespace mmtab;

int main(int argc, char** argv) {
  CLI::App app{"write a random table corpus"};
  std::string out_dir;
  fixtures::CorpusOptions o;
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--count", o.count, "number of valid tables");
  app.add_option("--malformed", o.malformed, "number of extra broken files");
  app.add_option("--seed", o.seed, "seed");
  app.add_option("--max-rows", o.max_rows, "maximum rows")->check(CLI::PositiveNumber);
  app.add_option("--max-cols", o.max_cols, "maximum columns")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  fixtures::write_corpus(out_dir, o);
  std::cout << "wrote " << o.count << " tables";
  if (o.malformed) std::cout << " and " << o.malformed << " malformed files";
  std::cout << " to " << out_dir << '\n';
  return 0;
}

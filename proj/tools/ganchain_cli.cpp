// Command-line front end; subcommands are wired up in src/chain/.
#include <cstdio>

#include "CLI11.hpp"
#include "ganchain/data/synth.hpp"
#include "ganchain/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ganchain: sequential GAN / GAN-classifier training chains"};
  app.require_subcommand(1);

  std::string out_dir = "corpus";
  int64_t count = 10000;
  uint64_t seed = 1;
  auto* synth = app.add_subcommand("synth-corpus", "generate a synthetic digit corpus (IDX)");
  synth->add_option("-o,--out", out_dir, "output directory");
  synth->add_option("-n,--count", count, "number of images");
  synth->add_option("--seed", seed, "render seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      auto files = ganchain::data::synth_corpus(out_dir, count, seed);
      std::printf("wrote %s and %s\n", files.images_path.c_str(), files.labels_path.c_str());
    }
  } catch (const ganchain::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return ganchain::exit_code_for(e.kind());
  }
  return 0;
}

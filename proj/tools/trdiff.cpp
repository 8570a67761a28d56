#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "trdiff/config.hpp"
#include "trdiff/errors.hpp"
#include "trdiff/pipeline.hpp"

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("TRDIFF_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid TRDIFF_THREADS='" << env << "'\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-resolved diffraction from laser-driven graphene"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned threads = 0;
  for (const auto& [name, help] : std::initializer_list<std::pair<const char*, const char*>>{
           {"bands", "band structure along Gamma-K-M-Gamma"},
           {"propagate", "conduction population and real-space snapshots"},
           {"diffract", "channel-resolved diffraction traces"},
           {"spectrum", "omega / 2 omega content of the diffraction traces"},
           {"validate", "invariant suite over all modules"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--threads", threads, "worker threads (default: TRDIFF_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : trdiff::exit_config;
  }
  if (threads == 0) threads = default_threads();
  const std::string subcommand = app.get_subcommands().front()->get_name();

  trdiff::RunConfig cfg;
  try {
    cfg = trdiff::parse_config(config_path);
  } catch (const trdiff::Error& e) {
    std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
    return trdiff::exit_config;
  }
  return trdiff::run_pipeline(cfg, subcommand, threads, std::cerr);
}

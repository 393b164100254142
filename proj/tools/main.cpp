#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "occsel/errors.hpp"
#include "occsel/pipeline.hpp"
#include "occsel/run_config.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir;
  CLI::App* sub = nullptr;
};

void add_common(CLI::App& app, const std::string& name, const std::string& description,
                CommonFlags& flags) {
  flags.sub = app.add_subcommand(name, description);
  flags.sub->add_option("--config", flags.config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  flags.sub->add_option("--seed", flags.seed, "override the config seed");
  flags.sub->add_option("--threads", flags.threads, "override the worker count");
  flags.sub->add_option("--out", flags.out_dir, "override the output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Objective Bayes variable selection for site-occupancy surveys"};
  app.require_subcommand(1);
  CommonFlags simulate, select, aic, report;
  add_common(app, "simulate", "run the synthetic selection-performance grid", simulate);
  add_common(app, "select", "model search and posterior selection reports", select);
  add_common(app, "aic", "exhaustive information-criterion baseline", aic);
  add_common(app, "report", "re-summarize stored posterior scores", report);
  CLI11_PARSE(app, argc, argv);

  const CommonFlags* active = nullptr;
  for (const CommonFlags* flags : {&simulate, &select, &aic, &report})
    if (flags->sub->parsed()) active = flags;

  try {
    occsel::RunConfig config = occsel::load_run_config(active->config_path);
    config.command = active->sub->get_name();
    if (active->sub->count("--seed")) config.seed = active->seed;
    if (active->sub->count("--threads")) {
      if (active->threads < 1) throw occsel::ConfigError("--threads must be at least 1");
      config.threads = active->threads;
    }
    if (active->sub->count("--out")) config.out_dir = active->out_dir;

    const std::vector<std::string> files = occsel::run_pipeline(config);
    for (const std::string& file : files)
      std::cout << config.out_dir << "/" << file << "\n";
    return 0;
  } catch (const occsel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const occsel::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const occsel::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

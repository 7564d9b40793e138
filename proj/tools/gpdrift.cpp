#include <chrono>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "gpdrift/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
};

int run(const std::string& command, const Options& opt) {
  using namespace gpdrift;
  auto config = exp::load_config(opt.config);
  if (exp::subcommand(config.experiment) != command) {
    throw ConfigError("config describes experiment '" + exp::to_string(config.experiment) + "', which runs under '" +
                      exp::subcommand(config.experiment) + "', not '" + command + "'");
  }
  if (opt.seed) config.master_seed = *opt.seed;
  const std::size_t workers =
      opt.workers > 0 ? opt.workers : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const auto csv = exp::resolve_output_path(opt.out.empty() ? config.output_path : opt.out);

  const auto start = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = exp::run_experiment(config, workers);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  exp::write_outputs(report, csv, {opt.config, workers, exp::utc_timestamp(start), wall});

  std::cerr << exp::to_string(config.experiment) << ": " << report.rows().size() << " rows, " << report.failed()
            << " failed, written to " << csv.string() << '\n';
  for (const auto& r : report.rows()) {
    if (!r.pass) std::cerr << "  FAIL " << r.scheme << " T=" << r.T << " N=" << r.N << " " << r.metric << " = "
                           << exp::format_double(r.value) << (r.note.empty() ? "" : "  (" + r.note + ")") << '\n';
  }
  return static_cast<int>(report.exit_code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift estimation experiments for Gaussian-process-driven models"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"mc", "Monte Carlo bias, variance and normality of the estimators"},
      {"consistency", "variance and MSE decay over a horizon sweep"},
      {"d2c", "convergence of the discrete estimator to the continuous one"},
      {"residual", "weight-function solver residuals and stability"},
      {"ops", "fractional-calculus operator identities"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output CSV path (relative paths resolve against $GPDRIFT_OUTPUT_DIR)");
    sub->add_option("--workers", opt.workers, "worker threads (0 = all cores)");
    sub->add_option("--seed", opt.seed, "override master_seed from the config");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(gpdrift::ExitCode::config);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const gpdrift::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(gpdrift::ExitCode::solver);
  }
}

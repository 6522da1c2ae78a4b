#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cowest/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace cowest;

namespace {

struct Overrides {
  std::optional<std::int64_t> seed;
  std::optional<std::size_t> max_requests;
  std::optional<std::string> cache_dir;
  std::optional<std::string> output_dir;
};

cli::RunConfig load(const std::string& path, const Overrides& o) {
  if (path.empty()) throw ConfigError("config", "--config is required");
  auto config = cli::load_config(path);
  if (o.seed) config.seed = *o.seed;
  if (o.max_requests) config.limits.max_requests = *o.max_requests;
  if (o.cache_dir) config.cache_dir = fs::absolute(*o.cache_dir);
  if (o.output_dir) config.output_dir = fs::absolute(*o.output_dir);
  return config;
}

void print_calls(const cli::CommandOutcome& r) {
  std::cout << "backend calls: weak " << r.weak_calls << ", strong " << r.strong_calls
            << ", judge " << r.judge_calls << "\n"
            << "outputs in " << r.run_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-strong collaboration: inference, preference data, toy alignment"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--seed", overrides.seed, "Override the configured seed");
    sub->add_option("--max-requests", overrides.max_requests, "Cap on backend requests");
    sub->add_option("--cache-dir", overrides.cache_dir, "Response cache directory");
    sub->add_option("--output-dir", overrides.output_dir, "Root directory for run outputs");
  };

  auto* infer = app.add_subcommand("infer", "Collaborative or strong-only inference + scoring");
  add_run_flags(infer);
  cli::InferOptions infer_opts;
  infer->add_flag("--strong-only", infer_opts.strong_only, "Strong model alone (baseline)");
  infer->add_option("--split", infer_opts.split, "eval or train")->check(CLI::IsMember({"eval", "train"}));

  auto* prefs = app.add_subcommand("build-prefs", "Build DPO preference triplets");
  add_run_flags(prefs);

  auto* toy = app.add_subcommand("train-toy", "SFT + DPO on a toy universe and check the result");
  add_run_flags(toy);

  auto* report = app.add_subcommand("report", "Render metric reports side by side");
  std::vector<std::string> report_paths;
  bool paper = false;
  std::string fixture;
  report->add_option("paths", report_paths, "Metric report files");
  report->add_flag("--paper", paper, "Append the published reference column");
  report->add_option("--paper-fixture", fixture, "Reference fixture (defaults to the shipped one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kExitConfig;
  }

  try {
    if (*report) {
      std::optional<fs::path> ref;
      if (paper || !fixture.empty())
        ref = fixture.empty() ? cli::default_data_dir() / "paper_table1.json" : fs::path(fixture);
      std::vector<fs::path> paths(report_paths.begin(), report_paths.end());
      std::cout << cli::cmd_report(paths, ref);
      return cli::kExitOk;
    }
    const auto config = load(config_path, overrides);
    cli::CommandOutcome outcome;
    if (*infer) outcome = cli::cmd_infer(config, infer_opts, std::cout);
    else if (*prefs) outcome = cli::cmd_build_prefs(config, std::cout);
    else outcome = cli::cmd_train_toy(config, std::cout);
    print_calls(outcome);
    return outcome.exit_code;
  } catch (const Error& e) {
    std::cerr << cli::error_line(e) << std::endl;
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << R"({"error":"internal","message":)" << nlohmann::json(e.what()).dump() << "}"
              << std::endl;
    return cli::kExitOther;
  }
}

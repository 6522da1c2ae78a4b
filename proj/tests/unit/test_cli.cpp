#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>

#include "cowest/cli/commands.hpp"
#include "cowest/cli/config.hpp"
#include "cowest/core/errors.hpp"
#include "cowest/core/records.hpp"
#include "fixtures.hpp"

using namespace cowest;
using namespace cowest::cli;

#ifndef COWEST_TEST_DATA_DIR
#error "COWEST_TEST_DATA_DIR must be defined"
#endif
#ifndef COWEST_CLI_PATH
#error "COWEST_CLI_PATH must be defined"
#endif

namespace {

struct Run {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

Run run_cli(const std::string& args, const fs::path& scratch) {
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string(COWEST_CLI_PATH) + " " + args + " 2>" + err.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.stdout_text.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.stderr_text = fs::exists(err) ? read_text_file(err) : "";
  return r;
}

Record config_doc(const testing::FixturePaths& paths) {
  return nlohmann::json::parse(read_text_file(paths.config));
}

fs::path write_config(const fs::path& dir, const std::string& name, const Record& doc) {
  const auto path = dir / name;
  write_text_file(path, doc.dump(2));
  return path;
}

}  // namespace

TEST_CASE("config parsing names the offending field") {
  const auto dir = testing::temp_dir("cli_config");
  const auto paths = testing::write_scripted_fixture(dir, "fixture", testing::golden_examples());
  auto doc = config_doc(paths);
  const auto ok = parse_config(doc, dir);
  CHECK(ok.sampling.k == 5);
  CHECK(ok.dataset == dir / "fixture.jsonl");
  CHECK(ok.run_id().size() == 12);
  CHECK(ok.run_id() == parse_config(doc, dir).run_id());

  auto reseeded = ok;
  reseeded.seed = 7;
  CHECK(reseeded.run_id() != ok.run_id());

  doc["sampling"]["bogus"] = 1;
  try {
    parse_config(doc, dir);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "sampling.bogus");
  }

  auto no_dataset = config_doc(paths);
  no_dataset.erase("dataset");
  const auto c = parse_config(no_dataset, dir);
  try {
    validate_for(c, Command::build_prefs);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "dataset");
  }

  auto bad_k = config_doc(paths);
  bad_k["sampling"]["K"] = 0;
  CHECK_THROWS_AS(validate_for(parse_config(bad_k, dir), Command::build_prefs), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("exit code mapping and error lines") {
  CHECK(exit_code_for(ErrorCode::config_error) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::budget_exceeded) == kExitBudget);
  CHECK(exit_code_for(ErrorCode::divergence_detected) == kExitDivergence);
  CHECK(exit_code_for(ErrorCode::fixture_miss) == kExitOther);
  const auto line = nlohmann::json::parse(error_line(ConfigError("alignment.alpha", "must be > 0")));
  CHECK(line["error"] == "ConfigError");
  CHECK(line["field"] == "alignment.alpha");
}

TEST_CASE("infer is byte-identical across runs and both modes score") {
  const auto dir = testing::temp_dir("cli_infer");
  const auto paths = testing::write_scripted_fixture(dir, "fixture", testing::golden_examples());
  const auto config = load_config(paths.config);
  std::ostringstream sink;
  const auto first = cmd_infer(config, {}, sink);
  CHECK(first.exit_code == kExitOk);
  CHECK(first.weak_calls == 2);
  CHECK(first.strong_calls == 2);
  const auto out = first.run_dir / "outputs" / "infer_collab.jsonl";
  const auto text = read_text_file(out);
  CHECK(cmd_infer(config, {}, sink).run_dir == first.run_dir);
  CHECK(read_text_file(out) == text);
  const auto records = read_records(out);
  REQUIRE(records.size() == 2);
  CHECK(records[0]["stage"] == "refined");

  const auto strong = cmd_infer(config, {true, "eval"}, sink);
  CHECK(strong.weak_calls == 0);
  CHECK(strong.strong_calls == 2);
  const auto metrics = read_records(strong.run_dir / "reports" / "metrics_strong_only.jsonl");
  REQUIRE(metrics.size() == 2);
  CHECK(metrics[0]["metric"] == "em");
  CHECK(metrics[0]["value"] == 1.0);
  CHECK_THROWS_AS(cmd_infer(config, {false, "test"}, sink), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("build-prefs resumes from the cache without new calls") {
  const auto dir = testing::temp_dir("cli_cache");
  const auto paths = testing::write_scripted_fixture(dir, "fixture", testing::generated_examples(3));
  auto config = load_config(paths.config);
  config.cache_dir = dir / "cache";
  std::ostringstream sink;
  const auto cold = cmd_build_prefs(config, sink);
  CHECK(cold.weak_calls + cold.strong_calls + cold.judge_calls == 3 * 17);
  const auto warm = cmd_build_prefs(config, sink);
  CHECK(warm.weak_calls + warm.strong_calls + warm.judge_calls == 0);
  CHECK(read_text_file(cold.run_dir / "prefs" / "preferences.jsonl") ==
        read_text_file(warm.run_dir / "prefs" / "preferences.jsonl"));
  fs::remove_all(dir);
}

TEST_CASE("train-toy without DPO steps fails the corollary") {
  auto config = load_config(fs::path(COWEST_TEST_DATA_DIR) / "toy_config.json");
  const auto dir = testing::temp_dir("cli_toy");
  config.output_dir = dir;
  config.alignment.steps = 0;
  std::ostringstream sink;
  const auto outcome = cmd_train_toy(config, sink);
  CHECK(outcome.exit_code == kExitOther);
  const auto report = nlohmann::json::parse(read_text_file(outcome.run_dir / "reports" / "corollary.json"));
  CHECK(report["status"] == "FAIL");
  CHECK(sink.str().find("FAIL") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("binary exit codes") {
  const auto dir = testing::temp_dir("cli_binary");
  const auto paths = testing::write_scripted_fixture(dir, "fixture", testing::generated_examples(4));
  const std::string cfg = " --config " + paths.config.string();

  const auto ok = run_cli("build-prefs" + cfg, dir);
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("triplets") != std::string::npos);

  const auto budget = run_cli("build-prefs --max-requests 10" + cfg, dir);
  CHECK(budget.exit_code == 3);

  auto doc = config_doc(paths);
  doc.erase("dataset");
  const auto missing = run_cli("build-prefs --config " + write_config(dir, "nodata.json", doc).string(), dir);
  CHECK(missing.exit_code == 2);
  const auto line = nlohmann::json::parse(missing.stderr_text.substr(0, missing.stderr_text.find('\n')));
  CHECK(line["error"] == "ConfigError");
  CHECK(line["field"] == "dataset");

  CHECK(run_cli("frobnicate", dir).exit_code == 2);
  CHECK(run_cli("infer --config " + (dir / "absent.json").string(), dir).exit_code == 2);

  const auto report = run_cli("report --paper", dir);
  CHECK(report.exit_code == 0);
  CHECK(report.stdout_text.find("75.85") != std::string::npos);
  fs::remove_all(dir);
}

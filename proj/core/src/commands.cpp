#include "cowest/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <thread>

#include "cowest/backend/cache.hpp"
#include "cowest/backend/prng.hpp"
#include "cowest/backend/toy_backend.hpp"
#include "cowest/collab/pipeline.hpp"
#include "cowest/core/dataset.hpp"
#include "cowest/metrics/metrics.hpp"
#include "cowest/metrics/report.hpp"
#include "cowest/prefdata/prefdata.hpp"
#include "cowest/toyalign/objectives.hpp"
#include "cowest/toyalign/training.hpp"

#ifndef COWEST_DEFAULT_DATA_DIR
#define COWEST_DEFAULT_DATA_DIR "data"
#endif

namespace cowest::cli {

using backend::Backend;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::missing_file:
    case ErrorCode::malformed_record:
    case ErrorCode::duplicate_id:
    case ErrorCode::constraint_violation:
    case ErrorCode::template_error:
      return kExitConfig;
    case ErrorCode::budget_exceeded:
      return kExitBudget;
    case ErrorCode::divergence_detected:
      return kExitDivergence;
    default:
      return kExitOther;
  }
}

std::string error_line(const Error& error) {
  Record r = {{"error", std::string(to_string(error.code()))}, {"message", error.what()}};
  if (const auto* c = dynamic_cast<const ConfigError*>(&error)) r["field"] = c->field();
  if (const auto* m = dynamic_cast<const MissingFile*>(&error)) r["path"] = m->path();
  if (const auto* d = dynamic_cast<const DivergenceDetected*>(&error)) r["step"] = d->step();
  return to_line(r);
}

fs::path default_data_dir() {
  if (const char* env = std::getenv("COWEST_DATA_DIR")) return env;
  return COWEST_DEFAULT_DATA_DIR;
}

namespace {

std::shared_ptr<const toyalign::ToyUniverse> shared_universe(const BackendSpec& spec) {
  return std::make_shared<const toyalign::ToyUniverse>(toyalign::load_universe(*spec.universe));
}

collab::TemplateSet templates_for(const RunConfig& config) {
  return config.templates_dir ? collab::load_templates(*config.templates_dir)
                              : collab::TemplateSet::defaults();
}

void prepare_run_dir(const RunConfig& config, const fs::path& run_dir) {
  write_text_file(run_dir / "config.json", config.to_record().dump(2) + "\n");
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
}

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendSpec& spec, Role role, const RunConfig& config) {
  if (spec.kind == "scripted") {
    return backend::ScriptedBackend::from_file(*spec.fixture, spec.model.value_or("scripted"));
  }
  if (spec.kind == "http") {
    backend::HttpBackendOptions opts;
    opts.base_url = *spec.base_url;
    opts.model = *spec.model;
    opts.api_key = backend::api_key_from_environment();
    opts.retry.max_attempts = config.limits.retries;
    opts.retry.base_delay = std::chrono::milliseconds(config.limits.backoff_ms);
    return std::make_unique<backend::HttpBackend>(std::move(opts));
  }
  auto universe = shared_universe(spec);
  switch (role) {
    case Role::weak: {
      toyalign::ToyPolicy policy = toyalign::ToyPolicy::uniform(*universe);
      if (spec.policy) policy = toyalign::policy_from_records(read_records(*spec.policy), *universe);
      return std::make_unique<backend::ToyWeakBackend>(universe, std::move(policy));
    }
    case Role::strong:
      return std::make_unique<backend::ToyStrongBackend>(universe);
    case Role::judge:
      return std::make_unique<backend::ToyJudgeBackend>(universe);
  }
  throw ConfigError("backends", "unsupported backend");
}

CommandOutcome cmd_infer(const RunConfig& config, const InferOptions& options, std::ostream& out) {
  validate_for(config, Command::infer);
  if (options.split != "eval" && options.split != "train")
    throw ConfigError("split", "must be eval or train");
  const fs::path dataset_path =
      options.split == "eval" && config.eval_dataset ? *config.eval_dataset : *config.dataset;
  const Dataset dataset = load_dataset(dataset_path);

  auto budget = std::make_shared<backend::RequestBudget>(config.limits.max_requests);
  auto weak = make_backend(config.weak, Role::weak, config);
  auto strong = make_backend(config.strong, Role::strong, config);
  weak->set_budget(budget);
  strong->set_budget(budget);
  std::optional<backend::ResponseCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);

  collab::RunLog log;
  collab::PipelineContext ctx;
  ctx.templates = templates_for(config);
  ctx.seed = config.seed;
  ctx.cache = cache ? &*cache : nullptr;
  ctx.log = &log;
  backend::Sampler weak_sampler{config.sampling.inference_temperature, config.sampling.top_p,
                                config.sampling.max_new_tokens};

  struct Row {
    std::optional<collab::StageOutput> output;
    std::optional<std::string> error;
    ErrorCode code = ErrorCode::backend_unavailable;
  };
  std::vector<Row> rows(dataset.examples.size());
  parallel_for(rows.size(), config.limits.max_in_flight, [&](std::size_t i) {
    const auto& ex = dataset.examples[i];
    try {
      rows[i].output = options.strong_only ? collab::strong_only(*strong, ex, ctx)
                                           : collab::collab_infer(*weak, *strong, ex, ctx,
                                                                  weak_sampler);
    } catch (const Error& e) {
      rows[i].error = e.what();
      rows[i].code = e.code();
    }
  });

  const std::string mode = options.strong_only ? "strong_only" : "collab";
  const fs::path run_dir = config.run_dir();
  prepare_run_dir(config, run_dir);

  std::vector<Record> records;
  std::map<TaskKind, std::vector<metrics::ScoredOutput>> by_kind;
  std::size_t failures = 0;
  bool budget_hit = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& ex = dataset.examples[i];
    if (rows[i].error) {
      ++failures;
      budget_hit = budget_hit || rows[i].code == ErrorCode::budget_exceeded;
      records.push_back({{"error", *rows[i].error}, {"example_id", ex.id}});
      continue;
    }
    const auto& o = *rows[i].output;
    records.push_back({{"example_id", ex.id},
                       {"extracted_answer", collab::extract_final_answer(o.text)},
                       {"fallback", o.fallback},
                       {"final_text", o.text},
                       {"stage", std::string(collab::to_string(o.stage))}});
    by_kind[ex.task_kind].push_back({ex, o.text});
  }
  write_records(run_dir / "outputs" / ("infer_" + mode + ".jsonl"), records);
  const auto log_records = log.records();
  write_records(run_dir / "logs" / ("infer_" + mode + "_run_log.jsonl"), log_records);

  std::vector<Record> reports;
  for (const auto& [kind, outputs] : by_kind)
    for (const auto& m : metrics::score_run(outputs, kind))
      reports.push_back(metrics::report_record(dataset.name, m));
  write_records(run_dir / "reports" / ("metrics_" + mode + ".jsonl"), reports);

  out << "run " << config.run_id() << ": " << mode << " inference on " << dataset.examples.size()
      << " examples (" << failures << " failed, " << log.fallback_count() << " fallbacks)\n";
  for (const auto& r : reports) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", r["value"].get<double>());
    out << "  " << r["metric"].get<std::string>() << " = " << buf << "\n";
  }

  CommandOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.weak_calls = weak->call_count();
  outcome.strong_calls = strong->call_count();
  outcome.exit_code = budget_hit ? kExitBudget : (failures > 0 ? kExitOther : kExitOk);
  return outcome;
}

namespace {

void write_prefs(const fs::path& run_dir, const prefdata::BuildResult& result,
                 const collab::RunLog& log, const std::string& log_name) {
  prefdata::export_dpo(result.triplets, result.stats, run_dir / "prefs" / "preferences.jsonl");
  std::vector<Record> samples;
  for (const auto& s : result.samples) samples.push_back(s.to_record());
  write_records(run_dir / "prefs" / "samples.jsonl", samples);
  write_records(run_dir / "logs" / "judge_audit.jsonl", result.judge_audit);
  write_records(run_dir / "logs" / log_name, log.records());
}

void print_stats(std::ostream& out, const prefdata::PrefStats& s) {
  out << "  examples processed " << s.examples_processed << ", skipped " << s.examples_skipped
      << ", incomplete " << s.examples_incomplete << "\n"
      << "  samples judged " << s.samples_judged << ", parse drops " << s.dropped_parse_failures
      << ", other drops " << s.dropped_other_failures << ", positive rate " << s.positive_rate()
      << "\n"
      << "  triplets " << s.triplet_count << (s.partial ? " (partial)" : "") << "\n";
}

}  // namespace

CommandOutcome cmd_build_prefs(const RunConfig& config, std::ostream& out) {
  validate_for(config, Command::build_prefs);
  const Dataset dataset = load_dataset(*config.dataset);

  auto budget = std::make_shared<backend::RequestBudget>(config.limits.max_requests);
  auto weak = make_backend(config.weak, Role::weak, config);
  auto strong = make_backend(config.strong, Role::strong, config);
  auto judge = make_backend(config.judge_spec(), Role::judge, config);
  for (Backend* b : {weak.get(), strong.get(), judge.get()}) b->set_budget(budget);
  std::optional<backend::ResponseCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);

  collab::RunLog log;
  prefdata::BuildOptions opts;
  opts.samples_per_example = config.sampling.k;
  opts.weak_sampler = {config.sampling.temperature, config.sampling.top_p,
                       config.sampling.max_new_tokens};
  opts.pipeline.templates = templates_for(config);
  opts.pipeline.seed = config.seed;
  opts.pipeline.cache = cache ? &*cache : nullptr;
  opts.pipeline.log = &log;
  opts.judge.tmpl = opts.pipeline.templates.judge;
  opts.judge.seed = config.seed;
  opts.judge.cache = opts.pipeline.cache;
  opts.max_in_flight = config.limits.max_in_flight;

  const auto result = prefdata::build_preferences(dataset, *weak, *strong, *judge, opts);
  const fs::path run_dir = config.run_dir();
  prepare_run_dir(config, run_dir);
  write_prefs(run_dir, result, log, "build_prefs_run_log.jsonl");

  out << "run " << config.run_id() << ": preference construction on " << dataset.examples.size()
      << " examples, K=" << config.sampling.k << "\n";
  print_stats(out, result.stats);
  out << "  wrote " << (run_dir / "prefs" / "preferences.jsonl").string() << "\n";

  CommandOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.weak_calls = weak->call_count();
  outcome.strong_calls = strong->call_count();
  outcome.judge_calls = judge->call_count();
  outcome.exit_code = result.stats.partial ? kExitBudget : kExitOk;
  return outcome;
}

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdTolerance = 1e-5;

// Random logits in [-2, 2), a random reference and one random triplet per
// context, drawn from the run seed.
double gradient_self_check(const toyalign::ToyUniverse& universe, std::int64_t seed, double alpha) {
  backend::SplitMix64 rng(static_cast<std::uint64_t>(seed) ^ 0xF00DULL);
  auto random_policy = [&] {
    toyalign::ToyPolicy p = toyalign::ToyPolicy::uniform(universe);
    for (auto& row : p.logits)
      for (auto& v : row) v = 4.0 * rng.next_unit() - 2.0;
    return p;
  };
  const auto policy = random_policy();
  const auto reference = random_policy();
  std::vector<toyalign::DpoTriplet> triplets;
  for (std::size_t c = 0; c < universe.size(); ++c) {
    const auto pos = universe.contexts[c].positive_support();
    const auto neg = universe.contexts[c].negative_support();
    triplets.push_back({c, pos[rng.next() % pos.size()], neg[rng.next() % neg.size()]});
  }
  const double sft = toyalign::fd_check(toyalign::sft_objective(universe), policy, kFdStep);
  const double dpo =
      toyalign::fd_check(toyalign::dpo_objective(reference, triplets, alpha), policy, kFdStep);
  return std::max(sft, dpo);
}

}  // namespace

CommandOutcome cmd_train_toy(const RunConfig& config, std::ostream& out) {
  validate_for(config, Command::train_toy);
  auto universe = shared_universe(config.weak);
  const auto& a = config.alignment;
  const fs::path run_dir = config.run_dir();
  prepare_run_dir(config, run_dir);

  const double fd_error = gradient_self_check(*universe, config.seed, a.alpha);
  out << "gradient self-check: max relative error " << fd_error << "\n";
  if (!(fd_error < kFdTolerance))
    throw PreconditionViolation("gradient self-check failed: " + std::to_string(fd_error));

  const auto init = toyalign::ToyPolicy::uniform(*universe);
  toyalign::TrainLog sft_log;
  toyalign::ToyPolicy sft;
  try {
    sft = toyalign::train_sft(*universe, init, {a.sft_lr, a.sft_steps}, &sft_log);
  } catch (const DivergenceDetected&) {
    write_records(run_dir / "logs" / "sft.jsonl", sft_log.records());
    throw;
  }
  write_records(run_dir / "logs" / "sft.jsonl", sft_log.records());
  write_records(run_dir / "outputs" / "policy_sft.jsonl", toyalign::policy_records(sft, *universe));

  backend::ToyWeakBackend weak(universe, sft);
  backend::ToyStrongBackend strong(universe);
  backend::ToyJudgeBackend judge(universe);
  collab::RunLog log;
  prefdata::BuildOptions opts;
  opts.samples_per_example = config.sampling.k;
  opts.weak_sampler = {config.sampling.temperature, config.sampling.top_p,
                       config.sampling.max_new_tokens};
  opts.pipeline.seed = config.seed;
  opts.pipeline.log = &log;
  opts.judge.seed = config.seed;
  opts.max_in_flight = 1;
  const Dataset dataset = toyalign::to_dataset(*universe);
  const auto prefs = prefdata::build_preferences(dataset, weak, strong, judge, opts);
  write_prefs(run_dir, prefs, log, "train_toy_run_log.jsonl");
  out << "preference construction:\n";
  print_stats(out, prefs.stats);

  std::vector<toyalign::DpoTriplet> triplets;
  for (const auto& t : prefs.triplets) {
    std::size_t ctx_index = 0;
    while (universe->contexts[ctx_index].id != t.meta.example_id) ++ctx_index;
    const auto& ctx = universe->contexts[ctx_index];
    const auto chosen = ctx.find(t.chosen);
    const auto rejected = ctx.find(t.rejected);
    if (!chosen || !rejected)
      throw PreconditionViolation("toy draft is not a vocab entry of " + ctx.id);
    triplets.push_back({ctx_index, *chosen, *rejected});
  }

  toyalign::TrainLog dpo_log;
  toyalign::ToyPolicy trained;
  try {
    trained = toyalign::train_dpo(*universe, sft, triplets, a.alpha, {a.lr, a.steps}, &dpo_log);
  } catch (const DivergenceDetected&) {
    write_records(run_dir / "logs" / "dpo.jsonl", dpo_log.records());
    throw;
  }
  write_records(run_dir / "logs" / "dpo.jsonl", dpo_log.records());
  write_records(run_dir / "outputs" / "policy_final.jsonl",
                toyalign::policy_records(trained, *universe));

  const auto report = toyalign::verify_corollary(trained, *universe, a.epsilon, &init);
  write_text_file(run_dir / "reports" / "corollary.json", report.to_record().dump(2) + "\n");
  out << "dpo: " << triplets.size() << " triplets, final loss " << dpo_log.steps.back().loss
      << "\nnegative-support mass (epsilon " << a.epsilon << "):\n";
  for (const auto& c : report.contexts)
    out << "  " << c.context << ": " << c.mass << " (initial " << c.initial_mass << ")\n";
  out << (report.pass ? "PASS" : "FAIL") << "\n";

  CommandOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.weak_calls = weak.call_count();
  outcome.strong_calls = strong.call_count();
  outcome.judge_calls = judge.call_count();
  outcome.exit_code = report.pass ? kExitOk : kExitOther;
  return outcome;
}

std::string cmd_report(const std::vector<fs::path>& paths,
                       const std::optional<fs::path>& reference_fixture) {
  std::vector<metrics::ReportColumn> columns;
  for (const auto& p : paths) columns.push_back(metrics::load_run_report(p));
  if (reference_fixture) columns.push_back(metrics::load_reference_fixture(*reference_fixture));
  if (columns.empty()) throw MissingFile("(none)", "no report files given");
  return metrics::render_table(columns);
}

}  // namespace cowest::cli

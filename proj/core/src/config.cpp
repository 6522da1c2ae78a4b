#include "cowest/cli/config.hpp"

#include <set>

#include "cowest/core/digest.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::cli {
namespace {

using Json = nlohmann::json;

void reject_unknown(const Json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
}

template <typename T>
T get_as(const Json& obj, const char* key, const std::string& field, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

std::optional<fs::path> get_path(const Json& obj, const char* key, const std::string& field,
                                 const fs::path& base) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(field, "must be a path string");
  fs::path p = it->get<std::string>();
  return p.is_absolute() ? p : base / p;
}

BackendSpec parse_backend(const Json& obj, const std::string& field, const fs::path& base) {
  if (!obj.is_object()) throw ConfigError(field, "must be an object");
  reject_unknown(obj, {"kind", "base_url", "model", "fixture", "universe", "policy"}, field);
  BackendSpec spec;
  spec.kind = get_as<std::string>(obj, "kind", field + ".kind", "");
  if (spec.kind != "scripted" && spec.kind != "http" && spec.kind != "toy")
    throw ConfigError(field + ".kind", "must be one of scripted, http, toy");
  if (obj.contains("base_url"))
    spec.base_url = get_as<std::string>(obj, "base_url", field + ".base_url", "");
  if (obj.contains("model")) spec.model = get_as<std::string>(obj, "model", field + ".model", "");
  spec.fixture = get_path(obj, "fixture", field + ".fixture", base);
  spec.universe = get_path(obj, "universe", field + ".universe", base);
  spec.policy = get_path(obj, "policy", field + ".policy", base);
  return spec;
}

Json backend_record(const BackendSpec& s) {
  Json r = {{"kind", s.kind}};
  if (s.base_url) r["base_url"] = *s.base_url;
  if (s.model) r["model"] = *s.model;
  if (s.fixture) r["fixture"] = s.fixture->string();
  if (s.universe) r["universe"] = s.universe->string();
  if (s.policy) r["policy"] = s.policy->string();
  return r;
}

void require_existing(const std::optional<fs::path>& p, const std::string& field) {
  if (!p) throw ConfigError(field, "is required");
  if (!fs::exists(*p)) throw ConfigError(field, "path does not exist: " + p->string());
}

void validate_backend(const BackendSpec& s, const std::string& field) {
  if (s.kind == "scripted") require_existing(s.fixture, field + ".fixture");
  if (s.kind == "http") {
    if (!s.base_url || s.base_url->empty()) throw ConfigError(field + ".base_url", "is required");
    if (!s.model || s.model->empty()) throw ConfigError(field + ".model", "is required");
  }
  if (s.kind == "toy") {
    require_existing(s.universe, field + ".universe");
    if (s.policy) require_existing(s.policy, field + ".policy");
  }
}

}  // namespace

RunConfig parse_config(const Json& doc, const fs::path& base) {
  if (!doc.is_object()) throw ConfigError("config", "must be a JSON object");
  reject_unknown(doc,
                 {"dataset", "eval_dataset", "templates_dir", "backends", "sampling", "alignment",
                  "limits", "cache_dir", "seed", "output_dir"},
                 "");
  RunConfig c;
  c.dataset = get_path(doc, "dataset", "dataset", base);
  c.eval_dataset = get_path(doc, "eval_dataset", "eval_dataset", base);
  c.templates_dir = get_path(doc, "templates_dir", "templates_dir", base);
  c.cache_dir = get_path(doc, "cache_dir", "cache_dir", base);
  if (auto out = get_path(doc, "output_dir", "output_dir", base)) c.output_dir = *out;
  else c.output_dir = base / "runs";
  c.seed = get_as<std::int64_t>(doc, "seed", "seed", 0);

  const auto backends = doc.value("backends", Json::object());
  if (!backends.is_object()) throw ConfigError("backends", "must be an object");
  reject_unknown(backends, {"weak", "strong", "judge"}, "backends");
  if (!backends.contains("weak")) throw ConfigError("backends.weak", "is required");
  if (!backends.contains("strong")) throw ConfigError("backends.strong", "is required");
  c.weak = parse_backend(backends["weak"], "backends.weak", base);
  c.strong = parse_backend(backends["strong"], "backends.strong", base);
  if (backends.contains("judge")) c.judge = parse_backend(backends["judge"], "backends.judge", base);

  const auto sampling = doc.value("sampling", Json::object());
  reject_unknown(sampling, {"K", "temperature", "top_p", "max_new_tokens", "inference_temperature"},
                 "sampling");
  c.sampling.k = get_as<std::size_t>(sampling, "K", "sampling.K", c.sampling.k);
  c.sampling.temperature =
      get_as<double>(sampling, "temperature", "sampling.temperature", c.sampling.temperature);
  c.sampling.top_p = get_as<double>(sampling, "top_p", "sampling.top_p", c.sampling.top_p);
  c.sampling.max_new_tokens = get_as<std::int64_t>(sampling, "max_new_tokens",
                                                   "sampling.max_new_tokens",
                                                   c.sampling.max_new_tokens);
  c.sampling.inference_temperature =
      get_as<double>(sampling, "inference_temperature", "sampling.inference_temperature",
                     c.sampling.inference_temperature);

  const auto alignment = doc.value("alignment", Json::object());
  reject_unknown(alignment, {"alpha", "lr", "steps", "epsilon", "sft_lr", "sft_steps"}, "alignment");
  auto& a = c.alignment;
  a.alpha = get_as<double>(alignment, "alpha", "alignment.alpha", a.alpha);
  a.lr = get_as<double>(alignment, "lr", "alignment.lr", a.lr);
  a.steps = get_as<std::size_t>(alignment, "steps", "alignment.steps", a.steps);
  a.epsilon = get_as<double>(alignment, "epsilon", "alignment.epsilon", a.epsilon);
  a.sft_lr = get_as<double>(alignment, "sft_lr", "alignment.sft_lr", a.sft_lr);
  a.sft_steps = get_as<std::size_t>(alignment, "sft_steps", "alignment.sft_steps", a.sft_steps);

  const auto limits = doc.value("limits", Json::object());
  reject_unknown(limits, {"max_in_flight", "max_requests", "retries", "backoff_ms"}, "limits");
  auto& l = c.limits;
  l.max_in_flight = get_as<std::size_t>(limits, "max_in_flight", "limits.max_in_flight",
                                        l.max_in_flight);
  if (limits.contains("max_requests") && !limits["max_requests"].is_null())
    l.max_requests = get_as<std::size_t>(limits, "max_requests", "limits.max_requests", 0);
  l.retries = get_as<int>(limits, "retries", "limits.retries", l.retries);
  l.backoff_ms = get_as<std::int64_t>(limits, "backoff_ms", "limits.backoff_ms", l.backoff_ms);
  return c;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config", "file does not exist: " + path.string());
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

Record RunConfig::to_record() const {
  Json r = Json::object();
  if (dataset) r["dataset"] = dataset->string();
  if (eval_dataset) r["eval_dataset"] = eval_dataset->string();
  if (templates_dir) r["templates_dir"] = templates_dir->string();
  if (cache_dir) r["cache_dir"] = cache_dir->string();
  r["output_dir"] = output_dir.string();
  r["seed"] = seed;
  r["backends"] = {{"weak", backend_record(weak)}, {"strong", backend_record(strong)}};
  if (judge) r["backends"]["judge"] = backend_record(*judge);
  r["sampling"] = {{"K", sampling.k},
                   {"temperature", sampling.temperature},
                   {"top_p", sampling.top_p},
                   {"max_new_tokens", sampling.max_new_tokens},
                   {"inference_temperature", sampling.inference_temperature}};
  r["alignment"] = {{"alpha", alignment.alpha}, {"lr", alignment.lr},
                    {"steps", alignment.steps}, {"epsilon", alignment.epsilon},
                    {"sft_lr", alignment.sft_lr}, {"sft_steps", alignment.sft_steps}};
  r["limits"] = {{"max_in_flight", limits.max_in_flight},
                 {"max_requests", limits.max_requests ? Json(*limits.max_requests) : Json()},
                 {"retries", limits.retries},
                 {"backoff_ms", limits.backoff_ms}};
  return r;
}

std::string RunConfig::run_id() const {
  return sha256_hex(to_line(to_record()) + "#seed=" + std::to_string(seed)).substr(0, 12);
}

void validate_for(const RunConfig& c, Command command) {
  if (c.sampling.k < 1) throw ConfigError("sampling.K", "must be >= 1");
  if (!(c.alignment.alpha > 0.0)) throw ConfigError("alignment.alpha", "must be > 0");
  if (c.limits.max_in_flight < 1) throw ConfigError("limits.max_in_flight", "must be >= 1");
  if (c.limits.retries < 1) throw ConfigError("limits.retries", "must be >= 1");
  if (c.sampling.top_p <= 0.0 || c.sampling.top_p > 1.0)
    throw ConfigError("sampling.top_p", "must lie in (0, 1]");
  if (c.sampling.temperature < 0.0) throw ConfigError("sampling.temperature", "must be >= 0");
  if (c.templates_dir) require_existing(c.templates_dir, "templates_dir");

  switch (command) {
    case Command::infer:
      require_existing(c.dataset, "dataset");
      if (c.eval_dataset) require_existing(c.eval_dataset, "eval_dataset");
      validate_backend(c.weak, "backends.weak");
      validate_backend(c.strong, "backends.strong");
      break;
    case Command::build_prefs:
      require_existing(c.dataset, "dataset");
      validate_backend(c.weak, "backends.weak");
      validate_backend(c.strong, "backends.strong");
      validate_backend(c.judge_spec(), c.judge ? "backends.judge" : "backends.strong");
      break;
    case Command::train_toy:
      if (c.weak.kind != "toy") throw ConfigError("backends.weak.kind", "train-toy needs a toy weak backend");
      require_existing(c.weak.universe, "backends.weak.universe");
      if (!(c.alignment.lr > 0.0)) throw ConfigError("alignment.lr", "must be > 0");
      if (!(c.alignment.sft_lr > 0.0)) throw ConfigError("alignment.sft_lr", "must be > 0");
      if (!(c.alignment.epsilon > 0.0)) throw ConfigError("alignment.epsilon", "must be > 0");
      break;
  }
}

}  // namespace cowest::cli

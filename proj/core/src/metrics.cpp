#include "cowest/metrics/metrics.hpp"

#include <algorithm>
#include <map>

#include "cowest/collab/pipeline.hpp"
#include "cowest/core/errors.hpp"
#include "cowest/core/normalize.hpp"

namespace cowest::metrics {

Record MetricReport::to_record() const {
  Record r = {{"metric", metric}, {"n", n}, {"value", value}};
  if (per_class) {
    Record arr = Record::array();
    for (const auto& c : *per_class)
      arr.push_back({{"f1", c.f1}, {"label", c.label}, {"precision", c.precision},
                     {"recall", c.recall}});
    r["per_class"] = std::move(arr);
  }
  return r;
}

MetricReport MetricReport::from_record(const Record& r) {
  MetricReport m;
  try {
    m.metric = r.at("metric").get<std::string>();
    m.value = r.at("value").get<double>();
    m.n = r.at("n").get<std::size_t>();
    if (r.contains("per_class")) {
      std::vector<ClassScore> pc;
      for (const auto& c : r["per_class"])
        pc.push_back({c.at("label").get<std::string>(), c.at("precision").get<double>(),
                      c.at("recall").get<double>(), c.at("f1").get<double>()});
      m.per_class = std::move(pc);
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(0, e.what());
  }
  return m;
}

int exact_match(std::string_view pred, std::string_view gold) {
  return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

double token_f1(std::string_view pred, std::string_view gold) {
  const auto p = answer_tokens(pred);
  const auto g = answer_tokens(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, std::size_t> gold_counts;
  for (const auto& t : g) ++gold_counts[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

double accuracy(std::span<const std::string> preds, std::span<const std::string> golds) {
  if (preds.size() != golds.size()) throw LengthMismatch(preds.size(), golds.size());
  if (preds.empty()) throw PreconditionViolation("accuracy of an empty run");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += exact_match(preds[i], golds[i]);
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

MetricReport macro_f1(std::span<const std::string> preds, std::span<const std::string> golds,
                      std::span<const std::string> labels) {
  if (preds.size() != golds.size()) throw LengthMismatch(preds.size(), golds.size());
  std::vector<std::string> norm_labels;
  for (const auto& l : labels) norm_labels.push_back(normalize_label(l));
  auto index_of = [&](const std::string& text) -> std::optional<std::size_t> {
    const auto n = normalize_label(text);
    auto it = std::find(norm_labels.begin(), norm_labels.end(), n);
    if (it == norm_labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - norm_labels.begin());
  };
  std::vector<std::size_t> tp(labels.size()), fp(labels.size()), fn(labels.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto g = index_of(golds[i]);
    if (!g) throw UnknownLabel(golds[i]);
    const auto p = index_of(preds[i]);
    if (p && *p == *g) {
      ++tp[*g];
    } else {
      ++fn[*g];
      if (p) ++fp[*p];
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  MetricReport report{"macro_f1", 0.0, preds.size(), std::vector<ClassScore>{}};
  double sum = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    ClassScore c{labels[k], ratio(tp[k], tp[k] + fp[k]), ratio(tp[k], tp[k] + fn[k]), 0.0};
    c.f1 = (c.precision + c.recall) == 0.0
               ? 0.0
               : 2.0 * c.precision * c.recall / (c.precision + c.recall);
    sum += c.f1;
    report.per_class->push_back(std::move(c));
  }
  report.value = labels.empty() ? 0.0 : sum / static_cast<double>(labels.size());
  return report;
}

std::string to_choice_label(const Example& example, const std::string& answer) {
  if (!example.choices) return answer;
  const auto norm = normalize_label(answer);
  for (const auto& c : *example.choices)
    if (normalize_label(c.label) == norm) return c.label;
  for (const auto& c : *example.choices)
    if (normalize_answer(c.text) == normalize_answer(answer)) return c.label;
  return answer;
}

namespace {

std::string to_class_label(const Example& example, const std::string& answer) {
  if (!example.label_set) return answer;
  const auto norm = normalize_label(answer);
  for (const auto& l : *example.label_set)
    if (normalize_label(l) == norm) return l;
  return answer;
}

}  // namespace

std::vector<MetricReport> score_run(std::span<const ScoredOutput> outputs, TaskKind kind) {
  if (outputs.empty()) throw PreconditionViolation("no outputs to score");
  std::vector<std::string> preds, golds;
  for (const auto& o : outputs) {
    auto answer = collab::extract_final_answer(o.final_text);
    if (kind == TaskKind::multiple_choice) answer = to_choice_label(o.example, answer);
    if (kind == TaskKind::classification) answer = to_class_label(o.example, answer);
    preds.push_back(std::move(answer));
    golds.push_back(o.example.ground_truth);
  }
  const std::size_t n = outputs.size();
  if (kind == TaskKind::open_qa) {
    double em = 0.0, f1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      em += exact_match(preds[i], golds[i]);
      f1 += token_f1(preds[i], golds[i]);
    }
    return {MetricReport{"em", em / static_cast<double>(n), n, std::nullopt},
            MetricReport{"token_f1", f1 / static_cast<double>(n), n, std::nullopt}};
  }
  std::vector<std::string> labels;
  auto add_label = [&](const std::string& l) {
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  };
  for (const auto& o : outputs) {
    if (kind == TaskKind::multiple_choice && o.example.choices)
      for (const auto& c : *o.example.choices) add_label(c.label);
    if (kind == TaskKind::classification && o.example.label_set)
      for (const auto& l : *o.example.label_set) add_label(l);
  }
  // Closed-form answers are compared in label space, where "A" is a label and
  // not an article.
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += preds[i] == golds[i] ? 1 : 0;
  return {MetricReport{"accuracy", static_cast<double>(hits) / static_cast<double>(n), n,
                       std::nullopt},
          macro_f1(preds, golds, labels)};
}

}  // namespace cowest::metrics

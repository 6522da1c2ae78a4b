#include "cowest/prefdata/prefdata.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include "cowest/backend/batch.hpp"
#include "cowest/core/errors.hpp"

namespace cowest::prefdata {

using backend::BatchResult;
using backend::Completion;
using backend::GenerationRequest;
using backend::ItemError;

std::string_view to_string(Polarity polarity) noexcept {
  return polarity == Polarity::positive ? "positive" : "negative";
}

Record SampleRecord::to_record() const {
  return {{"delta", delta},
          {"draft_text", draft_text},
          {"e_collab", e_collab},
          {"e_strong", e_strong},
          {"example_id", example_id},
          {"polarity", std::string(prefdata::to_string(polarity))},
          {"refined_text", refined_text},
          {"sample_index", sample_index}};
}

Record PrefStats::to_record() const {
  return {{"dropped_other_failures", dropped_other_failures},
          {"dropped_parse_failures", dropped_parse_failures},
          {"examples_incomplete", examples_incomplete},
          {"examples_processed", examples_processed},
          {"examples_skipped", examples_skipped},
          {"partial", partial},
          {"positive_rate", positive_rate()},
          {"samples_judged", samples_judged},
          {"triplet_count", triplet_count}};
}

std::vector<PreferenceTriplet> pair(std::span<const SampleRecord> positives,
                                    std::span<const SampleRecord> negatives,
                                    const std::string& prompt) {
  const std::size_t n = std::min(positives.size(), negatives.size());
  std::vector<PreferenceTriplet> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& pos = positives[j];
    const auto& neg = negatives[j];
    out.push_back(PreferenceTriplet{
        prompt, pos.draft_text, neg.draft_text,
        TripletMeta{pos.example_id, pos.e_strong, pos.e_collab, neg.e_collab, pos.sample_index,
                    neg.sample_index}});
  }
  return out;
}

namespace {

enum class SlotState { pending, ok, dropped_parse, dropped_other, budget };

// Judges a list of (query, candidate, ground truth) items, re-prompting the
// ones whose reply fails to parse.
struct JudgeItem {
  std::string query;
  std::string candidate;
  std::string ground_truth;
  std::optional<judge::EvalScore> score;
  SlotState state = SlotState::pending;
};

void judge_all(std::vector<JudgeItem>& items, backend::Backend& judge_backend,
               const BuildOptions& options) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].candidate.empty()) {
      items[i].state = SlotState::dropped_other;
    } else {
      todo.push_back(i);
    }
  }
  for (int attempt = 0; attempt <= judge::kParseRetries && !todo.empty(); ++attempt) {
    std::vector<GenerationRequest> requests;
    requests.reserve(todo.size());
    for (std::size_t i : todo) {
      requests.push_back(judge::judge_request(items[i].query, items[i].candidate,
                                              items[i].ground_truth, judge_backend.model_id(),
                                              attempt, options.judge));
    }
    const auto results =
        backend::run_batch(judge_backend, options.judge.cache, requests, options.max_in_flight);
    std::vector<std::size_t> retry;
    for (std::size_t k = 0; k < todo.size(); ++k) {
      auto& item = items[todo[k]];
      if (const auto* err = std::get_if<ItemError>(&results[k])) {
        item.state = err->code == ErrorCode::budget_exceeded ? SlotState::budget
                                                             : SlotState::dropped_other;
        continue;
      }
      const auto& text = std::get<Completion>(results[k]).text;
      try {
        const auto s = judge::parse_judge_reply(text);
        item.score = judge::EvalScore{s.coherence, s.consistency, s.total, text};
        item.state = SlotState::ok;
      } catch (const JudgeParseError&) {
        item.state = SlotState::dropped_parse;
        retry.push_back(todo[k]);
      }
    }
    todo = std::move(retry);
  }
}

SlotState state_of(const BatchResult& r) {
  if (const auto* err = std::get_if<ItemError>(&r))
    return err->code == ErrorCode::budget_exceeded ? SlotState::budget : SlotState::dropped_other;
  return SlotState::ok;
}

}  // namespace

BuildResult build_preferences(const Dataset& dataset, backend::Backend& weak,
                              backend::Backend& strong, backend::Backend& judge_backend,
                              const BuildOptions& options) {
  const std::size_t K = options.samples_per_example;
  if (K == 0) throw PreconditionViolation("K must be >= 1");
  const auto& ctx = options.pipeline;
  const auto& examples = dataset.examples;
  const std::size_t n = examples.size();
  BuildResult result;

  // Strong-only answers and their scores.
  std::vector<GenerationRequest> strong_requests;
  for (const auto& ex : examples)
    strong_requests.push_back(collab::strong_only_request(ex, strong.model_id(), ctx));
  const auto strong_results =
      backend::run_batch(strong, ctx.cache, strong_requests, options.max_in_flight);

  std::vector<SlotState> example_state(n, SlotState::ok);
  std::vector<JudgeItem> strong_judging(n);
  for (std::size_t e = 0; e < n; ++e) {
    example_state[e] = state_of(strong_results[e]);
    auto& item = strong_judging[e];
    item.query = examples[e].query;
    item.ground_truth = examples[e].ground_truth;
    if (example_state[e] == SlotState::ok) {
      const auto& c = std::get<Completion>(strong_results[e]);
      item.candidate = c.text;
      if (ctx.log)
        ctx.log->append(collab::to_stage_output(examples[e].id, collab::Stage::strong_only, 0, c));
    } else {
      item.state = example_state[e];
    }
  }
  {
    std::vector<std::size_t> live;
    std::vector<JudgeItem> subset;
    for (std::size_t e = 0; e < n; ++e) {
      if (example_state[e] != SlotState::ok) continue;
      live.push_back(e);
      subset.push_back(strong_judging[e]);
    }
    judge_all(subset, judge_backend, options);
    for (std::size_t k = 0; k < live.size(); ++k) {
      strong_judging[live[k]] = subset[k];
      example_state[live[k]] = subset[k].state;
    }
  }
  for (std::size_t e = 0; e < n; ++e) {
    if (example_state[e] == SlotState::ok) {
      result.judge_audit.push_back(judge::audit_record(
          examples[e].id, collab::to_string(collab::Stage::strong_only), 0,
          *strong_judging[e].score));
    }
  }

  // K weak drafts per surviving example.
  struct Slot {
    std::size_t example = 0;
    std::uint64_t sample_index = 0;
    SlotState state = SlotState::ok;
    std::string draft;
    std::string refined;
    std::optional<judge::EvalScore> score;
  };
  std::vector<Slot> slots;
  std::vector<GenerationRequest> draft_requests;
  for (std::size_t e = 0; e < n; ++e) {
    if (example_state[e] != SlotState::ok) continue;
    for (std::uint64_t i = 0; i < K; ++i) {
      Slot slot;
      slot.example = e;
      slot.sample_index = i;
      slots.push_back(std::move(slot));
      draft_requests.push_back(
          collab::weak_draft_request(examples[e], i, options.weak_sampler, weak.model_id(), ctx));
    }
  }
  const auto draft_results = backend::run_batch(weak, ctx.cache, draft_requests, options.max_in_flight);

  std::vector<GenerationRequest> refine_requests;
  std::vector<std::size_t> refine_slots;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    slots[s].state = state_of(draft_results[s]);
    if (slots[s].state != SlotState::ok) continue;
    const auto& c = std::get<Completion>(draft_results[s]);
    slots[s].draft = c.text;
    if (ctx.log)
      ctx.log->append(collab::to_stage_output(examples[slots[s].example].id,
                                              collab::Stage::weak_draft, slots[s].sample_index, c));
    refine_requests.push_back(collab::refine_request(examples[slots[s].example], c.text,
                                                     slots[s].sample_index, strong.model_id(), ctx));
    refine_slots.push_back(s);
  }
  const auto refine_results =
      backend::run_batch(strong, ctx.cache, refine_requests, options.max_in_flight);

  std::vector<JudgeItem> collab_judging;
  std::vector<std::size_t> judged_slots;
  for (std::size_t k = 0; k < refine_slots.size(); ++k) {
    auto& slot = slots[refine_slots[k]];
    slot.state = state_of(refine_results[k]);
    if (slot.state != SlotState::ok) continue;
    const auto& c = std::get<Completion>(refine_results[k]);
    slot.refined = c.text;
    if (ctx.log)
      ctx.log->append(collab::to_stage_output(examples[slot.example].id, collab::Stage::refined,
                                              slot.sample_index, c));
    collab_judging.push_back(JudgeItem{examples[slot.example].query, c.text,
                                       examples[slot.example].ground_truth, std::nullopt,
                                       SlotState::pending});
    judged_slots.push_back(refine_slots[k]);
  }
  judge_all(collab_judging, judge_backend, options);
  for (std::size_t k = 0; k < judged_slots.size(); ++k) {
    auto& slot = slots[judged_slots[k]];
    slot.state = collab_judging[k].state;
    slot.score = collab_judging[k].score;
  }

  // Classification and pairing, example by example in dataset order.
  auto& stats = result.stats;
  std::size_t cursor = 0;
  for (std::size_t e = 0; e < n; ++e) {
    if (example_state[e] == SlotState::budget) {
      ++stats.examples_incomplete;
      continue;
    }
    if (example_state[e] != SlotState::ok) {
      ++stats.examples_skipped;
      continue;
    }
    const auto first = cursor;
    cursor += K;
    const bool cut_short = std::any_of(slots.begin() + first, slots.begin() + cursor,
                                       [](const Slot& s) { return s.state == SlotState::budget; });
    if (cut_short) {
      ++stats.examples_incomplete;
      continue;
    }
    const int e_strong = strong_judging[e].score->total;
    std::vector<SampleRecord> positives, negatives;
    for (std::size_t s = first; s < cursor; ++s) {
      const auto& slot = slots[s];
      if (slot.state == SlotState::dropped_parse) {
        ++stats.dropped_parse_failures;
        continue;
      }
      if (slot.state != SlotState::ok) {
        ++stats.dropped_other_failures;
        continue;
      }
      SampleRecord rec;
      rec.example_id = examples[e].id;
      rec.sample_index = slot.sample_index;
      rec.draft_text = slot.draft;
      rec.refined_text = slot.refined;
      rec.e_collab = slot.score->total;
      rec.e_strong = e_strong;
      rec.delta = rec.e_collab - rec.e_strong;
      rec.polarity = classify(rec.delta);
      ++stats.samples_judged;
      result.judge_audit.push_back(judge::audit_record(
          examples[e].id, collab::to_string(collab::Stage::refined), slot.sample_index, *slot.score));
      (rec.polarity == Polarity::positive ? positives : negatives).push_back(rec);
      result.samples.push_back(std::move(rec));
    }
    stats.positives += positives.size();
    const auto prompt = collab::weak_draft_request(examples[e], 0, options.weak_sampler,
                                                   weak.model_id(), ctx)
                            .messages.back()
                            .text;
    auto triplets = pair(positives, negatives, prompt);
    result.triplets.insert(result.triplets.end(), std::make_move_iterator(triplets.begin()),
                           std::make_move_iterator(triplets.end()));
    ++stats.examples_processed;
  }
  stats.triplet_count = result.triplets.size();
  stats.partial = stats.examples_incomplete > 0;
  return result;
}

Record to_record(const PreferenceTriplet& t) {
  return {{"chosen", t.chosen},
          {"meta",
           {{"chosen_index", t.meta.chosen_index},
            {"e_collab_chosen", t.meta.e_collab_chosen},
            {"e_collab_rejected", t.meta.e_collab_rejected},
            {"e_strong", t.meta.e_strong},
            {"example_id", t.meta.example_id},
            {"rejected_index", t.meta.rejected_index}}},
          {"prompt", t.prompt},
          {"rejected", t.rejected}};
}

PreferenceTriplet triplet_from_record(const Record& r) {
  try {
    const auto& m = r.at("meta");
    return PreferenceTriplet{
        r.at("prompt").get<std::string>(), r.at("chosen").get<std::string>(),
        r.at("rejected").get<std::string>(),
        TripletMeta{m.at("example_id").get<std::string>(), m.at("e_strong").get<int>(),
                    m.at("e_collab_chosen").get<int>(), m.at("e_collab_rejected").get<int>(),
                    m.at("chosen_index").get<std::uint64_t>(),
                    m.at("rejected_index").get<std::uint64_t>()}};
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(0, e.what());
  }
}

void sort_triplets(std::vector<PreferenceTriplet>& triplets) {
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const PreferenceTriplet& a, const PreferenceTriplet& b) {
                     return std::tie(a.meta.example_id, a.meta.chosen_index, a.meta.rejected_index) <
                            std::tie(b.meta.example_id, b.meta.chosen_index, b.meta.rejected_index);
                   });
}

std::filesystem::path stats_sidecar_path(const std::filesystem::path& path) {
  return path.parent_path() / (path.stem().string() + ".stats.json");
}

void export_dpo(std::vector<PreferenceTriplet> triplets, const PrefStats& stats,
                const std::filesystem::path& path) {
  sort_triplets(triplets);
  std::vector<Record> records;
  records.reserve(triplets.size());
  for (const auto& t : triplets) records.push_back(to_record(t));
  write_records(path, records);
  write_text_file(stats_sidecar_path(path), stats.to_record().dump(2) + "\n");
}

std::vector<PreferenceTriplet> read_dpo(const std::filesystem::path& path) {
  std::vector<PreferenceTriplet> out;
  for (const auto& r : read_records(path)) out.push_back(triplet_from_record(r));
  return out;
}

}  // namespace cowest::prefdata

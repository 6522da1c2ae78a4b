#include <doctest.h>

#include <random>

#include "cowest/core/errors.hpp"
#include "cowest/core/records.hpp"
#include "cowest/prefdata/prefdata.hpp"
#include "fixtures.hpp"

using namespace cowest;
using namespace cowest::prefdata;
namespace fs = std::filesystem;

#ifndef COWEST_TEST_GOLDEN_DIR
#error "COWEST_TEST_GOLDEN_DIR must be defined"
#endif

namespace {

SampleRecord sample(std::string id, std::uint64_t index, int e_collab, int e_strong) {
  SampleRecord s;
  s.example_id = std::move(id);
  s.sample_index = index;
  s.draft_text = "draft " + std::to_string(index);
  s.e_collab = e_collab;
  s.e_strong = e_strong;
  s.delta = e_collab - e_strong;
  s.polarity = classify(s.delta);
  return s;
}

struct Backends {
  std::unique_ptr<backend::ScriptedBackend> weak, strong, judge;
};

Backends backends_for(const std::vector<testing::ScriptedExample>& examples) {
  const auto lines = testing::script_lines(examples);
  return {testing::scripted(lines.weak, "w"), testing::scripted(lines.strong, "s"),
          testing::scripted(lines.judge, "j")};
}

Dataset dataset_of(const std::vector<testing::ScriptedExample>& examples) {
  Dataset ds{"fixture", {}};
  for (const auto& e : examples) ds.examples.push_back(e.example);
  return ds;
}

BuildOptions serial() {
  BuildOptions o;
  o.max_in_flight = 1;
  return o;
}

}  // namespace

TEST_CASE("classify: ties are negative") {
  CHECK(classify(1) == Polarity::positive);
  CHECK(classify(0) == Polarity::negative);
  CHECK(classify(-3) == Polarity::negative);
  CHECK(to_string(Polarity::positive) == "positive");
}

TEST_CASE("pair aligns by index and truncates to the shorter list") {
  std::vector<SampleRecord> pos = {sample("e", 0, 9, 5), sample("e", 2, 8, 5), sample("e", 4, 7, 5)};
  std::vector<SampleRecord> neg = {sample("e", 1, 3, 5), sample("e", 3, 2, 5), sample("e", 5, 1, 5),
                                   sample("e", 6, 5, 5), sample("e", 7, 4, 5)};
  const auto t = pair(pos, neg, "prompt");
  REQUIRE(t.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(t[j].meta.chosen_index == pos[j].sample_index);
    CHECK(t[j].meta.rejected_index == neg[j].sample_index);
    CHECK(t[j].chosen == pos[j].draft_text);
    CHECK(t[j].prompt == "prompt");
  }
  CHECK(pair({}, neg, "p").empty());
  CHECK(pair(pos, {}, "p").empty());
}

TEST_CASE("golden two-example build") {
  const auto examples = testing::golden_examples();
  auto b = backends_for(examples);
  const auto result = build_preferences(dataset_of(examples), *b.weak, *b.strong, *b.judge, serial());
  REQUIRE(result.triplets.size() == 4);
  CHECK(result.triplets[0].meta == TripletMeta{"cf-001", 5, 7, 4, 0, 1});
  CHECK(result.triplets[1].meta == TripletMeta{"cf-001", 5, 6, 5, 2, 3});
  CHECK(result.triplets[2].meta == TripletMeta{"cf-002", 6, 8, 6, 2, 0});
  CHECK(result.triplets[3].meta == TripletMeta{"cf-002", 6, 9, 6, 3, 1});
  CHECK(result.triplets[0].chosen == examples[0].drafts[0]);
  CHECK(result.triplets[0].prompt.find(examples[0].example.query) != std::string::npos);
  CHECK(result.stats.samples_judged == 10);
  CHECK(result.stats.positives == 4);
  CHECK(result.stats.positive_rate() == doctest::Approx(0.4));
  CHECK_FALSE(result.stats.partial);
  // Per example: 1 strong-only + K drafts + K refinements; 1 + K judge calls.
  CHECK(b.weak->call_count() == 10);
  CHECK(b.strong->call_count() == 12);
  CHECK(b.judge->call_count() == 12);

  const auto dir = testing::temp_dir("prefs_golden");
  export_dpo(result.triplets, result.stats, dir / "preferences.jsonl");
  CHECK(read_text_file(dir / "preferences.jsonl") ==
        read_text_file(fs::path(COWEST_TEST_GOLDEN_DIR) / "preferences_2ex.jsonl"));
  CHECK(fs::exists(stats_sidecar_path(dir / "preferences.jsonl")));
  CHECK(read_dpo(dir / "preferences.jsonl") == result.triplets);
  fs::remove_all(dir);
}

TEST_CASE("unparseable judge reply drops only that sample") {
  const auto examples = testing::golden_examples();
  auto b = backends_for(examples);
  const judge::JudgeContext jctx;
  const auto& ex = examples[0];
  for (int attempt = 0; attempt <= judge::kParseRetries; ++attempt)
    b.judge->add_by_messages(judge::judge_request(ex.example.query, testing::refined_text(ex.drafts[1]),
                                                  ex.example.ground_truth, "", attempt, jctx)
                                 .messages,
                             static_cast<std::uint64_t>(attempt), "looks fine to me");
  const auto result = build_preferences(dataset_of(examples), *b.weak, *b.strong, *b.judge, serial());
  CHECK(result.stats.dropped_parse_failures == 1);
  CHECK(result.stats.samples_judged == 9);
  REQUIRE(result.triplets.size() == 4);
  CHECK(result.triplets[0].meta.rejected_index == 3);
  CHECK(result.triplets[1].meta.rejected_index == 4);
}

TEST_CASE("K = 1 never yields a triplet") {
  auto examples = testing::generated_examples(4, 1);
  auto b = backends_for(examples);
  auto opts = serial();
  opts.samples_per_example = 1;
  const auto result = build_preferences(dataset_of(examples), *b.weak, *b.strong, *b.judge, opts);
  CHECK(result.triplets.empty());
  CHECK(result.stats.samples_judged == 4);
}

TEST_CASE("request budget yields a partial result") {
  const auto examples = testing::generated_examples(6);
  auto b = backends_for(examples);
  auto budget = std::make_shared<backend::RequestBudget>(30);
  b.weak->set_budget(budget);
  b.strong->set_budget(budget);
  b.judge->set_budget(budget);
  const auto result = build_preferences(dataset_of(examples), *b.weak, *b.strong, *b.judge, serial());
  CHECK(result.stats.partial);
  CHECK(result.stats.examples_incomplete > 0);
  CHECK(budget->used() == 30);
  for (const auto& t : result.triplets) {
    const auto it = std::find_if(result.samples.begin(), result.samples.end(), [&](const auto& s) {
      return s.example_id == t.meta.example_id && s.sample_index == t.meta.chosen_index;
    });
    CHECK(it != result.samples.end());
  }
}

TEST_CASE("property: partition, polarity and pairing laws over random scores") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 1 + rng() % 8;
    auto examples = testing::generated_examples(2, k);
    for (auto& e : examples) {
      e.e_strong = 1 + static_cast<int>(rng() % 10);
      for (auto& s : e.e_collab) s = 1 + static_cast<int>(rng() % 10);
    }
    auto b = backends_for(examples);
    auto opts = serial();
    opts.samples_per_example = k;
    const auto result = build_preferences(dataset_of(examples), *b.weak, *b.strong, *b.judge, opts);
    std::size_t expected = 0;
    for (const auto& e : examples) {
      std::size_t pos = 0;
      for (int s : e.e_collab) pos += s > e.e_strong;
      expected += std::min(pos, k - pos);
    }
    CHECK(result.triplets.size() == expected);
    CHECK(result.samples.size() == 2 * k);
    for (const auto& s : result.samples) CHECK((s.polarity == Polarity::positive) == (s.delta > 0));
    for (const auto& t : result.triplets) {
      CHECK(t.meta.e_collab_chosen > t.meta.e_strong);
      CHECK(t.meta.e_collab_rejected <= t.meta.e_strong);
      CHECK(t.chosen != t.rejected);
    }
  }
}

TEST_CASE("export is byte-stable and round-trips") {
  std::vector<PreferenceTriplet> triplets = {
      {"p2", "c", "r", {"b", 4, 6, 2, 1, 0}},
      {"p1", "ünïcode \"quoted\"\n", "r\tx", {"a", 5, 7, 5, 0, 1}},
  };
  PrefStats stats;
  stats.triplet_count = 2;
  const auto dir = testing::temp_dir("prefs_export");
  export_dpo(triplets, stats, dir / "a.jsonl");
  std::reverse(triplets.begin(), triplets.end());
  export_dpo(triplets, stats, dir / "b.jsonl");
  CHECK(read_text_file(dir / "a.jsonl") == read_text_file(dir / "b.jsonl"));
  const auto back = read_dpo(dir / "a.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0].meta.example_id == "a");
  CHECK(back[0].prompt == "p1");
  CHECK(back[0].chosen == "ünïcode \"quoted\"\n");

  export_dpo({}, PrefStats{}, dir / "empty.jsonl");
  CHECK(read_text_file(dir / "empty.jsonl").empty());
  CHECK(fs::exists(stats_sidecar_path(dir / "empty.jsonl")));
  fs::remove_all(dir);
}

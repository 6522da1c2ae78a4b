#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <unistd.h>

#include "cowest/backend/request.hpp"
#include "cowest/collab/pipeline.hpp"
#include "cowest/judge/judge.hpp"

namespace cowest::testing {

std::string refined_text(const std::string& draft) {
  const auto at = draft.rfind("Answer:");
  const std::string answer = at == std::string::npos ? draft : draft.substr(at + 7);
  return "Reviewed the draft: " + draft + "\nAnswer:" + answer;
}

namespace {

Record line(const backend::GenerationRequest& r, const std::string& text) {
  return {{"messages", backend::messages_record(r.messages)},
          {"sample_index", r.sample_index},
          {"text", text}};
}

}  // namespace

ScriptLines script_lines(const std::vector<ScriptedExample>& examples,
                         const collab::TemplateSet& templates) {
  ScriptLines out;
  collab::PipelineContext ctx;
  ctx.templates = templates;
  judge::JudgeContext jctx;
  jctx.tmpl = templates.judge;
  for (const auto& s : examples) {
    const auto& ex = s.example;
    out.strong.push_back(line(collab::strong_only_request(ex, "", ctx), s.strong_text));
    out.judge.push_back(line(judge::judge_request(ex.query, s.strong_text, ex.ground_truth, "", 0, jctx),
                             judge::format_judge_reply(s.e_strong, s.e_strong, s.e_strong)));
    for (std::size_t i = 0; i < s.drafts.size(); ++i) {
      const auto draft = collab::weak_draft_request(ex, i, backend::kWeakTrainingSampler, "", ctx);
      out.weak.push_back(line(draft, s.drafts[i]));
      const auto refined = refined_text(s.drafts[i]);
      out.strong.push_back(line(collab::refine_request(ex, s.drafts[i], i, "", ctx), refined));
      const int e = s.e_collab.at(i);
      out.judge.push_back(line(judge::judge_request(ex.query, refined, ex.ground_truth, "", 0, jctx),
                               judge::format_judge_reply(e, e, e)));
    }
  }
  return out;
}

std::unique_ptr<backend::ScriptedBackend> scripted(const std::vector<Record>& lines,
                                                   const std::string& model) {
  auto b = std::make_unique<backend::ScriptedBackend>(model);
  for (const auto& l : lines)
    b->add_by_messages(backend::messages_from_record(l.at("messages")),
                       l.at("sample_index").get<std::uint64_t>(), l.at("text").get<std::string>());
  return b;
}

FixturePaths write_scripted_fixture(const fs::path& dir, const std::string& dataset_name,
                                    const std::vector<ScriptedExample>& examples, std::size_t k,
                                    std::int64_t seed) {
  FixturePaths p{dir / (dataset_name + ".jsonl"), dir / "weak.jsonl", dir / "strong.jsonl",
                 dir / "judge.jsonl", dir / "config.json"};
  Dataset ds{dataset_name, {}};
  for (const auto& s : examples) ds.examples.push_back(s.example);
  write_dataset(p.dataset, ds);
  const auto lines = script_lines(examples);
  write_records(p.weak, lines.weak);
  write_records(p.strong, lines.strong);
  write_records(p.judge, lines.judge);
  const Record config = {
      {"dataset", p.dataset.filename().string()},
      {"backends",
       {{"weak", {{"kind", "scripted"}, {"model", "weak-scripted"}, {"fixture", "weak.jsonl"}}},
        {"strong", {{"kind", "scripted"}, {"model", "strong-scripted"}, {"fixture", "strong.jsonl"}}},
        {"judge", {{"kind", "scripted"}, {"model", "judge-scripted"}, {"fixture", "judge.jsonl"}}}}},
      {"sampling", {{"K", k}}},
      {"seed", seed},
      {"output_dir", "runs"}};
  write_text_file(p.config, config.dump(2) + "\n");
  return p;
}

std::vector<ScriptedExample> golden_examples() {
  ScriptedExample a;
  a.example = {"cf-001", "If water froze at 50 degrees Celsius, would a 20 degree day melt ice?",
               "no", TaskKind::open_qa, std::nullopt, std::nullopt};
  a.strong_text = "Ice melts above its freezing point; 20 is below 50.\nAnswer: no";
  a.e_strong = 5;
  a.drafts = {"Background: freezing point is 50. 20 < 50 so ice stays frozen. Answer: no",
              "Background: ice always melts in daylight. Answer: yes",
              "Background: below the freezing point water is solid. Answer: no",
              "Background: unclear premise. Answer: maybe",
              "Background: heat melts ice. Answer: yes"};
  a.e_collab = {7, 4, 6, 5, 3};

  ScriptedExample b;
  b.example = {"cf-002", "If the Moon were twice as far away, would tides be weaker or stronger?",
               "weaker", TaskKind::open_qa, std::nullopt, std::nullopt};
  b.strong_text = "Tidal force falls with the cube of distance.\nAnswer: weaker";
  b.e_strong = 6;
  b.drafts = {"Background: gravity weakens with distance. Answer: weaker",
              "Background: tides depend on the Sun only. Answer: unchanged",
              "Background: tidal force scales as 1/d^3, so 1/8 as strong. Answer: weaker",
              "Background: doubling distance cuts tidal force eightfold. Answer: weaker",
              "Background: farther objects pull harder. Answer: stronger"};
  b.e_collab = {6, 6, 8, 9, 2};
  return {a, b};
}

std::vector<ScriptedExample> generated_examples(std::size_t n, std::size_t k) {
  std::vector<ScriptedExample> out;
  for (std::size_t e = 0; e < n; ++e) {
    ScriptedExample s;
    const auto id = "gen-" + std::to_string(e);
    s.example = {id, "Synthetic question number " + std::to_string(e) + "?",
                 "answer " + std::to_string(e), TaskKind::open_qa, std::nullopt, std::nullopt};
    s.strong_text = "Answer: answer " + std::to_string(e);
    s.e_strong = 5;
    for (std::size_t i = 0; i < k; ++i) {
      s.drafts.push_back("draft " + std::to_string(i) + " for " + id);
      s.e_collab.push_back(i % 2 == 0 ? 7 : 3);
    }
    out.push_back(std::move(s));
  }
  return out;
}

fs::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = fs::temp_directory_path() /
             ("cowest-" + tag + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(stamp) + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace cowest::testing

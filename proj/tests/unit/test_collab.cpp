#include <doctest.h>

#include <set>

#include "cowest/backend/backend.hpp"
#include "cowest/collab/pipeline.hpp"
#include "cowest/collab/templates.hpp"
#include "cowest/core/errors.hpp"
#include "fixtures.hpp"

using namespace cowest;
using namespace cowest::collab;
namespace fs = std::filesystem;

namespace {

Example open_qa(std::string id, std::string query) {
  return {std::move(id), std::move(query), "gt", TaskKind::open_qa, std::nullopt, std::nullopt};
}

Example multiple_choice() {
  return {"mc1", "Which vitamin deficiency causes scurvy?", "C", TaskKind::multiple_choice,
          std::vector<Choice>{{"A", "Vitamin A"}, {"B", "Vitamin B12"}, {"C", "Vitamin C"}},
          std::nullopt};
}

const std::string& user_text(const backend::GenerationRequest& r) { return r.messages.back().text; }

}  // namespace

TEST_CASE("template placeholders and escapes") {
  PromptTemplate t{"t", std::string("sys {role}"), "Q: {query} {{literal}} {x", {"query"}};
  CHECK(t.placeholders() == std::vector<std::string>{"role", "query"});
  const auto msgs = t.expand({{"role", "grader"}, {"query", "why?"}});
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].text == "sys grader");
  CHECK(msgs[1].text == "Q: why? {literal} {x");
  CHECK_THROWS_AS(t.expand({{"query", "why?"}}), TemplateError);
  PromptTemplate missing{"m", std::nullopt, "no placeholders", {"query"}};
  CHECK_THROWS_AS(missing.expand({{"query", "q"}}), TemplateError);
}

TEST_CASE("default templates carry the fixed wording") {
  const auto t = TemplateSet::defaults();
  CHECK(t.strong_cot.system == "You are an expert problem solver.");
  CHECK(t.judge.system == "You are a strict grader.");
  CHECK(t.refine.body.find(kDraftHeader) != std::string::npos);
  CHECK(t.judge.body.find("Coherence of reasoning logic") != std::string::npos);
  CHECK(t.judge.body.find("Consistency with ground truth") != std::string::npos);
}

TEST_CASE("load_templates overrides and validates") {
  const auto dir = testing::temp_dir("templates");
  write_text_file(dir / "weak_draft.txt", "Draft please: {query}");
  const auto set = load_templates(dir);
  CHECK(set.weak_draft.body == "Draft please: {query}");
  CHECK(set.refine.body == TemplateSet::defaults().refine.body);
  write_text_file(dir / "strong_cot.txt", "No query here");
  CHECK_THROWS_AS(load_templates(dir), TemplateError);
  fs::remove_all(dir);
}

TEST_CASE("request builders embed the query and separate sample indices") {
  PipelineContext ctx;
  const auto ex = open_qa("q1", "If cats could fly, would birds worry?");
  const auto strong = strong_only_request(ex, "s", ctx);
  CHECK(user_text(strong).find(ex.query) != std::string::npos);
  CHECK(strong.role_tag == backend::RoleTag::strong);
  std::set<std::string> digests;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const auto d = weak_draft_request(ex, i, backend::kWeakTrainingSampler, "w", ctx);
    CHECK(user_text(d).find(ex.query) != std::string::npos);
    CHECK(d.temperature == 1.0);
    CHECK(d.top_p == 0.9);
    CHECK(d.max_new_tokens == 1028);
    digests.insert(backend::request_digest(d));
  }
  CHECK(digests.size() == 5);
  const auto refine = refine_request(ex, "my draft", 3, "s", ctx);
  CHECK(user_text(refine).find(std::string(kDraftHeader) + "\nmy draft") != std::string::npos);
  CHECK(user_text(refine).find(ex.query) != std::string::npos);
  CHECK(refine.sample_index == 3);
}

TEST_CASE("multiple-choice prompts list the choices") {
  PipelineContext ctx;
  const auto r = strong_only_request(multiple_choice(), "s", ctx);
  CHECK(user_text(r).find("A) Vitamin A\nB) Vitamin B12\nC) Vitamin C") != std::string::npos);
}

TEST_CASE("custom template without {query} fails before any backend call") {
  PipelineContext ctx;
  ctx.templates.strong_cot.body = "Answer this: {question}";
  ctx.templates.strong_cot.required_placeholders = {};
  backend::ScriptedBackend strong;
  CHECK_THROWS_AS(strong_only(strong, open_qa("q", "x?"), ctx), TemplateError);
  CHECK(strong.call_count() == 0);
}

TEST_CASE("stages through scripted backends") {
  const auto ex = open_qa("q1", "What is the boiling point of water?");
  PipelineContext ctx;
  RunLog log;
  ctx.log = &log;
  backend::ScriptedBackend weak("w"), strong("s");
  strong.add_by_messages(strong_only_request(ex, "", ctx).messages, 0, "CoT\nAnswer: 100 C");
  weak.add_by_messages(weak_draft_request(ex, 0, backend::kWeakInferenceSampler, "", ctx).messages, 0,
                       "draft 0");
  strong.add_by_messages(refine_request(ex, "draft 0", 0, "", ctx).messages, 0, "Answer: refined");

  const auto z = strong_only(strong, ex, ctx);
  CHECK(z.text == "CoT\nAnswer: 100 C");
  CHECK(z.stage == Stage::strong_only);

  const auto d = weak_draft(weak, ex, 0, 5, backend::kWeakInferenceSampler, ctx);
  CHECK(d.stage == Stage::weak_draft);
  CHECK_THROWS_AS(weak_draft(weak, ex, 5, 5, backend::kWeakInferenceSampler, ctx), PreconditionViolation);

  const auto y = refine(strong, ex, d, ctx);
  CHECK(y.text == "Answer: refined");
  CHECK(y.stage == Stage::refined);
  CHECK_THROWS_AS(refine(strong, ex, y, ctx), PreconditionViolation);
  CHECK(log.records().size() == 3);
}

TEST_CASE("collab_infer: two calls per example, fallback when the weak model is down") {
  PipelineContext ctx;
  RunLog log;
  ctx.log = &log;
  backend::ScriptedBackend weak("w"), strong("s");
  std::vector<Example> examples = {open_qa("a", "First question?"), open_qa("b", "Second question?"),
                                   open_qa("c", "Third question?")};
  for (const auto& ex : examples) {
    weak.add_by_messages(weak_draft_request(ex, 0, backend::kWeakInferenceSampler, "", ctx).messages,
                         0, "draft for " + ex.id);
    strong.add_by_messages(refine_request(ex, "draft for " + ex.id, 0, "", ctx).messages, 0,
                           "Answer: refined " + ex.id);
  }
  for (const auto& ex : examples) {
    const auto out = collab_infer(weak, strong, ex, ctx);
    CHECK(out.text == "Answer: refined " + ex.id);
    CHECK(out.stage == Stage::refined);
  }
  CHECK(weak.call_count() == 3);
  CHECK(strong.call_count() == 3);
  CHECK(log.fallback_count() == 0);

  const auto down = open_qa("d", "Fourth question?");
  weak.add_failure_by_messages(
      weak_draft_request(down, 0, backend::kWeakInferenceSampler, "", ctx).messages, 0);
  strong.add_by_messages(strong_only_request(down, "", ctx).messages, 0, "Answer: baseline");
  const auto out = collab_infer(weak, strong, down, ctx);
  CHECK(out.fallback);
  CHECK(out.stage == Stage::strong_only);
  CHECK(out.text == "Answer: baseline");
  CHECK(log.fallback_count() == 1);
}

TEST_CASE("extract_final_answer") {
  CHECK(extract_final_answer("step 1\nAnswer: B\nmore\nAnswer:  C  ") == "C");
  CHECK(extract_final_answer("  just text \n") == "just text");
  CHECK(extract_final_answer("Answer: x\nThe Answer: y") == "x");
}

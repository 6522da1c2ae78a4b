#include "cowest/collab/templates.hpp"

#include <algorithm>
#include <cctype>

#include "cowest/core/errors.hpp"
#include "cowest/core/records.hpp"

namespace cowest::collab {
namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Calls on_text / on_placeholder for each piece of `text`.
template <typename Text, typename Placeholder>
void scan(std::string_view text, Text on_text, Placeholder on_placeholder) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if ((c == '{' || c == '}') && i + 1 < text.size() && text[i + 1] == c) {
      on_text(std::string_view(&text[i], 1));
      i += 2;
      continue;
    }
    if (c == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && is_name_char(text[j])) ++j;
      if (j > i + 1 && j < text.size() && text[j] == '}') {
        on_placeholder(text.substr(i + 1, j - i - 1));
        i = j + 1;
        continue;
      }
    }
    on_text(text.substr(i, 1));
    ++i;
  }
}

std::string expand_text(const std::string& text, const Bindings& bindings,
                        const std::string& template_name) {
  std::string out;
  scan(
      text, [&](std::string_view t) { out += t; },
      [&](std::string_view name) {
        auto it = bindings.find(name);
        if (it == bindings.end())
          throw TemplateError("template \"" + template_name + "\" has no binding for {" +
                              std::string(name) + "}");
        out += it->second;
      });
  return out;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  auto collect = [&](std::string_view name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
  };
  if (system) scan(*system, [](std::string_view) {}, collect);
  scan(body, [](std::string_view) {}, collect);
  return out;
}

std::vector<backend::Message> PromptTemplate::expand(const Bindings& bindings) const {
  const auto present = placeholders();
  for (const auto& req : required_placeholders) {
    if (std::find(present.begin(), present.end(), req) == present.end())
      throw TemplateError("template \"" + name + "\" lacks required placeholder {" + req + "}");
  }
  std::vector<backend::Message> messages;
  if (system) messages.push_back({backend::Speaker::system, expand_text(*system, bindings, name)});
  messages.push_back({backend::Speaker::user, expand_text(body, bindings, name)});
  return messages;
}

TemplateSet TemplateSet::defaults() {
  TemplateSet t;
  t.strong_cot = {"strong_cot", "You are an expert problem solver.",
                  "{query}\n\nThink step by step, then give the final answer on the last line as "
                  "'Answer: …'.",
                  {"query"}};
  t.weak_draft = {"weak_draft", std::nullopt,
                  "{query}\n\nProvide relevant background knowledge and a step-by-step draft "
                  "answer. End with 'Answer: …'.",
                  {"query"}};
  t.refine = {"refine", std::nullopt,
              "{query}\n\n" + std::string(kDraftHeader) +
                  "\n{draft}\n\nAssess the draft for flaws or gaps, correct them, and give the "
                  "final answer on the last line as 'Answer: …'.",
              {"query", "draft"}};
  t.judge = {"judge", "You are a strict grader.",
             "Grade the candidate answer to the question below.\n\nQuestion:\n{query}\n\n" +
                 std::string(kCandidateHeader) + "\n{candidate}\n\n" +
                 std::string(kGroundTruthHeader) +
                 "\n{ground_truth}\n\n"
                 "Criteria:\n"
                 "1. Coherence of reasoning logic\n"
                 "2. Consistency with ground truth\n\n"
                 "Reply with exactly three lines and nothing else:\n"
                 "Coherence: <integer from 1 to 10>\n"
                 "Consistency: <integer from 1 to 10>\n"
                 "Score: <overall integer from 1 to 10>",
             {"query", "candidate", "ground_truth"}};
  return t;
}

TemplateSet load_templates(const std::filesystem::path& dir) {
  TemplateSet set = TemplateSet::defaults();
  for (PromptTemplate* t : {&set.strong_cot, &set.weak_draft, &set.refine, &set.judge}) {
    const auto body = dir / (t->name + ".txt");
    const auto system = dir / (t->name + ".system.txt");
    if (std::filesystem::exists(body)) t->body = read_text_file(body);
    if (std::filesystem::exists(system)) t->system = read_text_file(system);
    const auto present = t->placeholders();
    for (const auto& req : t->required_placeholders) {
      if (std::find(present.begin(), present.end(), req) == present.end())
        throw TemplateError("template \"" + t->name + "\" in " + dir.string() +
                            " lacks required placeholder {" + req + "}");
    }
  }
  return set;
}

std::string render_choices(const Example& example) {
  std::string out;
  if (!example.choices) return out;
  for (const auto& c : *example.choices) {
    if (!out.empty()) out.push_back('\n');
    out += c.label + ") " + c.text;
  }
  return out;
}

Bindings example_bindings(const PromptTemplate& tmpl, const Example& example) {
  Bindings b;
  const std::string choices = render_choices(example);
  const auto present = tmpl.placeholders();
  const bool has_choices = std::find(present.begin(), present.end(), "choices") != present.end();
  b["choices"] = choices;
  b["query"] = (has_choices || choices.empty()) ? example.query : example.query + "\n\n" + choices;
  return b;
}

}  // namespace cowest::collab

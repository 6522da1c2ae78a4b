#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cowest/backend/request.hpp"
#include "cowest/core/dataset.hpp"

namespace cowest::collab {

using Bindings = std::map<std::string, std::string, std::less<>>;

/// A prompt with `{name}` placeholders in its user body and optional system
/// text. `{{` and `}}` produce literal braces; a `{` not starting a
/// placeholder is kept as is.
struct PromptTemplate {
  std::string name;
  std::optional<std::string> system;
  std::string body;
  std::set<std::string> required_placeholders;

  // Placeholder names occurring in system + body, in order of appearance.
  std::vector<std::string> placeholders() const;

  // Throws TemplateError when a required placeholder is absent from the
  // template or a placeholder has no binding.
  std::vector<backend::Message> expand(const Bindings& bindings) const;
};

// Header under which the refine prompt presents the weak draft.
inline constexpr std::string_view kDraftHeader =
    "Draft answer from a domain-specialized assistant:";
// Section headers of the judge prompt.
inline constexpr std::string_view kCandidateHeader = "Candidate answer:";
inline constexpr std::string_view kGroundTruthHeader = "Ground truth:";

struct TemplateSet {
  PromptTemplate strong_cot;
  PromptTemplate weak_draft;
  PromptTemplate refine;
  PromptTemplate judge;

  static TemplateSet defaults();
};

/// Overrides defaults from `{dir}/{name}.txt` (user body) and
/// `{dir}/{name}.system.txt` for name in strong_cot, weak_draft, refine, judge.
TemplateSet load_templates(const std::filesystem::path& dir);

// "A) text\nB) text" for multiple-choice examples, empty otherwise.
std::string render_choices(const Example& example);

// Bindings for an example. When the template has no {choices} placeholder the
// rendered choice list is appended to {query} so it still reaches the model.
Bindings example_bindings(const PromptTemplate& tmpl, const Example& example);

}  // namespace cowest::collab

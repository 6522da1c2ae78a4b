#pragma once

#include <memory>
#include <string>

#include "cowest/backend/backend.hpp"
#include "cowest/toyalign/policy.hpp"
#include "cowest/toyalign/universe.hpp"

namespace cowest::backend {

// The toy backends locate the context by the query text embedded in the last
// user message and rely on the section headers of the default refine and
// judge templates.

/// Weak model: draws a vocab entry from the policy for the located context
/// with SplitMix64 seeded by seed XOR sample_index, honouring the request's
/// temperature and top_p. The reply is the vocab entry verbatim.
class ToyWeakBackend : public Backend {
 public:
  ToyWeakBackend(std::shared_ptr<const toyalign::ToyUniverse> universe, toyalign::ToyPolicy policy);

  std::string model_id() const override { return model_id_; }
  const toyalign::ToyPolicy& policy() const noexcept { return policy_; }

 protected:
  std::string complete(const GenerationRequest& request, const std::string& digest) override;

 private:
  std::shared_ptr<const toyalign::ToyUniverse> universe_;
  toyalign::ToyPolicy policy_;
  std::string model_id_;
};

// Strong-only answer of the toy strong model.
inline constexpr std::string_view kToyBaselineAnswer = "(strong model baseline answer)";

/// Strong model: a refine prompt is answered with the vocab entry found in the
/// draft section ("Answer: <entry>"); any other prompt gets the baseline answer.
class ToyStrongBackend : public Backend {
 public:
  explicit ToyStrongBackend(std::shared_ptr<const toyalign::ToyUniverse> universe);

  std::string model_id() const override { return "toy-strong"; }

 protected:
  std::string complete(const GenerationRequest& request, const std::string& digest) override;

 private:
  std::shared_ptr<const toyalign::ToyUniverse> universe_;
};

/// Judge: scores the candidate section with the universe's quality table, or
/// with the context baseline when the candidate is the baseline answer. All
/// three reply fields carry the same score.
class ToyJudgeBackend : public Backend {
 public:
  explicit ToyJudgeBackend(std::shared_ptr<const toyalign::ToyUniverse> universe);

  std::string model_id() const override { return "toy-judge"; }

 protected:
  std::string complete(const GenerationRequest& request, const std::string& digest) override;

 private:
  std::shared_ptr<const toyalign::ToyUniverse> universe_;
};

}  // namespace cowest::backend

#include "cowest/toyalign/universe.hpp"

#include <algorithm>
#include <set>

#include "cowest/core/errors.hpp"
#include "cowest/core/records.hpp"

namespace cowest::toyalign {

std::vector<std::size_t> ToyContext::negative_support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < quality.size(); ++i)
    if (quality[i] <= baseline) out.push_back(i);
  return out;
}

std::vector<std::size_t> ToyContext::positive_support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < quality.size(); ++i)
    if (quality[i] > baseline) out.push_back(i);
  return out;
}

std::optional<std::size_t> ToyContext::find(std::string_view text) const {
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (vocab[i] == text) return i;
  return std::nullopt;
}

std::optional<std::size_t> ToyUniverse::locate(std::string_view text) const {
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    const auto& q = contexts[c].query;
    if (text.find(q) == std::string_view::npos) continue;
    if (!best || q.size() > contexts[*best].query.size()) best = c;
  }
  return best;
}

void validate(const ToyUniverse& u) {
  if (u.contexts.empty()) throw ConstraintViolation(u.name, "universe has no contexts");
  std::set<std::string> ids;
  for (const auto& c : u.contexts) {
    if (c.id.empty()) throw ConstraintViolation(c.id, "context id must be nonempty");
    if (!ids.insert(c.id).second) throw DuplicateId(c.id);
    if (c.query.empty()) throw ConstraintViolation(c.id, "query must be nonempty");
    if (c.vocab.size() < 2) throw ConstraintViolation(c.id, "need at least 2 vocab entries");
    if (std::set<std::string>(c.vocab.begin(), c.vocab.end()).size() != c.vocab.size())
      throw ConstraintViolation(c.id, "vocab entries must be distinct");
    if (c.ground_truth >= c.vocab.size())
      throw ConstraintViolation(c.id, "ground_truth index out of range");
    if (c.quality.size() != c.vocab.size())
      throw ConstraintViolation(c.id, "quality needs one score per vocab entry");
    for (int q : c.quality)
      if (q < 1 || q > 10) throw ConstraintViolation(c.id, "quality scores must lie in [1, 10]");
    if (c.baseline < 1 || c.baseline > 10)
      throw ConstraintViolation(c.id, "baseline must lie in [1, 10]");
    if (c.positive_support().empty() || c.negative_support().empty())
      throw ConstraintViolation(c.id, "both positive and negative supports must be nonempty");
  }
}

ToyUniverse load_universe(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecord(1, e.what());
  }
  ToyUniverse u;
  try {
    u.name = doc.value("name", path.stem().string());
    for (const auto& c : doc.at("contexts")) {
      ToyContext ctx;
      ctx.id = c.at("id").get<std::string>();
      ctx.query = c.at("query").get<std::string>();
      ctx.vocab = c.at("vocab").get<std::vector<std::string>>();
      ctx.ground_truth = c.at("ground_truth").get<std::size_t>();
      ctx.quality = c.at("quality").get<std::vector<int>>();
      ctx.baseline = c.at("baseline").get<int>();
      u.contexts.push_back(std::move(ctx));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(1, e.what());
  }
  validate(u);
  return u;
}

Dataset to_dataset(const ToyUniverse& u) {
  Dataset ds;
  ds.name = u.name;
  for (const auto& c : u.contexts) {
    Example ex;
    ex.id = c.id;
    ex.query = c.query;
    ex.ground_truth = c.vocab[c.ground_truth];
    ex.task_kind = TaskKind::open_qa;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace cowest::toyalign

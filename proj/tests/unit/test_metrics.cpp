#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cowest/core/errors.hpp"
#include "cowest/core/records.hpp"
#include "cowest/metrics/metrics.hpp"
#include "cowest/metrics/report.hpp"
#include "fixtures.hpp"

using namespace cowest;
using namespace cowest::metrics;
namespace fs = std::filesystem;

using Strings = std::vector<std::string>;

TEST_CASE("exact_match and token_f1 examples") {
  CHECK(exact_match("Paris", "paris.") == 1);
  CHECK(exact_match("the cat", "cat") == 1);
  CHECK(exact_match("cat", "dog") == 0);
  CHECK(token_f1("the cat sat", "cat sat down") == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(token_f1("a b c", "a b c") == 1.0);
  CHECK(token_f1("", "x") == 0.0);
  CHECK(token_f1("x", "") == 0.0);
  CHECK(token_f1("", "the") == 1.0);  // both normalize to nothing
  // Multiset overlap: "cat cat" vs "cat" shares one token.
  CHECK(token_f1("cat cat", "cat") == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("accuracy") {
  CHECK(accuracy(Strings{"a", "b", "c"}, Strings{"a", "b", "d"}) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(accuracy(Strings{"Yes."}, Strings{"yes"}) == 1.0);
  CHECK_THROWS_AS(accuracy(Strings{"a"}, Strings{"a", "b"}), LengthMismatch);
  CHECK_THROWS_AS(accuracy(Strings{}, Strings{}), PreconditionViolation);
}

TEST_CASE("macro_f1") {
  const auto r = macro_f1(Strings{"A", "A", "B"}, Strings{"A", "B", "B"}, Strings{"A", "B"});
  CHECK(r.metric == "macro_f1");
  CHECK(r.value == doctest::Approx(2.0 / 3).epsilon(1e-12));
  REQUIRE(r.per_class);
  CHECK((*r.per_class)[0].precision == doctest::Approx(0.5));
  CHECK((*r.per_class)[0].recall == doctest::Approx(1.0));
  CHECK((*r.per_class)[1].precision == doctest::Approx(1.0));
  CHECK((*r.per_class)[1].recall == doctest::Approx(0.5));
  CHECK(macro_f1(Strings{"A", "B"}, Strings{"A", "B"}, Strings{"A", "B"}).value == 1.0);
  CHECK(macro_f1(Strings{"A", "B"}, Strings{"A", "B"}, Strings{"A", "B", "C"}).value ==
        doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(macro_f1(Strings{"A"}, Strings{"Z"}, Strings{"A", "B"}), UnknownLabel);
  CHECK_THROWS_AS(macro_f1(Strings{"A"}, Strings{"A", "B"}, Strings{"A", "B"}), LengthMismatch);
  const auto back = MetricReport::from_record(r.to_record());
  CHECK(back.value == r.value);
  CHECK(back.per_class->size() == 2);
}

TEST_CASE("property: symmetry, bounds and permutation invariance") {
  std::mt19937_64 rng(21);
  const Strings words = {"the", "cat", "sat", "on", "a", "mat", "dog", "ran", "Paris", "."};
  auto phrase = [&] {
    std::string s;
    for (std::size_t i = 0, n = rng() % 6; i < n; ++i) s += words[rng() % words.size()] + " ";
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = phrase(), b = phrase();
    const double f = token_f1(a, b);
    CHECK(f == token_f1(b, a));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    if (exact_match(a, b) == 1) CHECK(f == 1.0);
  }
  const Strings labels = {"A", "B", "C", "D"};
  for (int trial = 0; trial < 200; ++trial) {
    Strings preds, golds;
    for (std::size_t i = 0, n = 1 + rng() % 12; i < n; ++i) {
      preds.push_back(labels[rng() % 4]);
      golds.push_back(labels[rng() % 4]);
    }
    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Strings p2, g2;
    for (auto i : order) {
      p2.push_back(preds[i]);
      g2.push_back(golds[i]);
    }
    CHECK(accuracy(preds, golds) == accuracy(p2, g2));
    const double m = macro_f1(preds, golds, labels).value;
    CHECK(m == doctest::Approx(macro_f1(p2, g2, labels).value).epsilon(1e-15));
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

TEST_CASE("score_run") {
  std::vector<ScoredOutput> qa;
  const Strings gold = {"Paris", "blue", "42", "no"};
  const Strings said = {"Reasoning...\nAnswer: paris", "Answer: Blue.", "Answer: 42", "Answer: yes"};
  for (std::size_t i = 0; i < 4; ++i)
    qa.push_back({{"q" + std::to_string(i), "q?", gold[i], TaskKind::open_qa, std::nullopt, std::nullopt}, said[i]});
  const auto reports = score_run(qa, TaskKind::open_qa);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].metric == "em");
  CHECK(reports[0].value == doctest::Approx(0.75));
  CHECK(reports[1].metric == "token_f1");
  CHECK(reports[0].n == 4);

  const std::vector<Choice> choices = {{"A", "Vitamin A"}, {"B", "Vitamin B12"}, {"C", "Vitamin C"}};
  std::vector<ScoredOutput> mc = {
      {{"m1", "q", "C", TaskKind::multiple_choice, choices, std::nullopt}, "Answer: C"},
      {{"m2", "q", "B", TaskKind::multiple_choice, choices, std::nullopt}, "Answer: Vitamin B12"},
      {{"m3", "q", "A", TaskKind::multiple_choice, choices, std::nullopt}, "Answer: C"},
  };
  const auto mr = score_run(mc, TaskKind::multiple_choice);
  REQUIRE(mr.size() == 2);
  CHECK(mr[0].metric == "accuracy");
  CHECK(mr[0].value == doctest::Approx(2.0 / 3));
  CHECK(mr[1].metric == "macro_f1");
  REQUIRE(mr[1].per_class);
  CHECK(mr[1].per_class->size() == 3);
  CHECK(to_choice_label(mc[0].example, "vitamin c") == "C");
  CHECK(to_choice_label(mc[0].example, "E") == "E");
  CHECK_THROWS(score_run(std::vector<ScoredOutput>{}, TaskKind::open_qa));
}

TEST_CASE("report rendering") {
  CHECK(display_name("em") == "EM");
  CHECK(display_name("token_f1") == "F1");
  CHECK(display_name("accuracy") == "Acc");
  const auto dir = testing::temp_dir("report");
  fs::create_directories(dir / "run1" / "reports");
  MetricReport em{"em", 0.75, 4, std::nullopt};
  MetricReport f1{"token_f1", 0.8, 4, std::nullopt};
  const std::vector<Record> lines = {report_record("counterfactual", em),
                                     report_record("counterfactual", f1)};
  write_records(dir / "run1" / "reports" / "metrics_collab.jsonl", lines);
  const auto col = load_run_report(dir / "run1" / "reports" / "metrics_collab.jsonl");
  CHECK(col.name == "run1/metrics_collab");
  REQUIRE(col.cells.size() == 2);
  CHECK(col.cells[0].value == "75.00");
  CHECK(col.cells[1].metric == "F1");

  ReportColumn other{"other", {{"counterfactual", "EM", "70.00"}, {"medicine", "Acc", "60.00"}}};
  const std::vector<ReportColumn> cols = {col, other};
  const auto table = render_table(cols);
  CHECK(table.find("run1/metrics_collab") != std::string::npos);
  CHECK(table.find("75.00") != std::string::npos);
  CHECK(table.find("70.00") != std::string::npos);
  CHECK(table.find('-') != std::string::npos);

  write_text_file(dir / "empty.jsonl", "");
  CHECK_THROWS_AS(load_run_report(dir / "empty.jsonl"), MissingFile);
  CHECK_THROWS_AS(load_run_report(dir / "absent.jsonl"), MissingFile);
  fs::remove_all(dir);
}

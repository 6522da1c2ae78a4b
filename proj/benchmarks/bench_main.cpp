#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "cowest/backend/request.hpp"
#include "cowest/core/normalize.hpp"
#include "cowest/judge/judge.hpp"
#include "cowest/metrics/metrics.hpp"
#include "cowest/toyalign/objectives.hpp"

using namespace cowest;

namespace {

std::string sentence(std::size_t words, std::mt19937_64& rng) {
  static const char* vocab[] = {"The",  "answer,", "is",   "a",     "Canberra!", "tidal",
                                "force", "weaker", "an",   "NSAID", "(since",    "1913)"};
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += vocab[rng() % std::size(vocab)];
  }
  return s;
}

void BM_NormalizeAnswer(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto text = sentence(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(normalize_answer(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_NormalizeAnswer)->Arg(8)->Arg(64)->Arg(512);

void BM_TokenF1(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = sentence(static_cast<std::size_t>(state.range(0)), rng);
  const auto b = sentence(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::token_f1(a, b));
}
BENCHMARK(BM_TokenF1)->Arg(8)->Arg(64)->Arg(512);

void BM_MacroF1(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> labels = {"A", "B", "C", "D", "E"};
  std::vector<std::string> preds, golds;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    preds.push_back(labels[rng() % labels.size()]);
    golds.push_back(labels[rng() % labels.size()]);
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::macro_f1(preds, golds, labels));
}
BENCHMARK(BM_MacroF1)->Arg(100)->Arg(10000);

void BM_RequestDigest(benchmark::State& state) {
  backend::GenerationRequest r;
  r.model = "weak";
  std::mt19937_64 rng(4);
  r.messages = {{backend::Speaker::system, "You are a helpful assistant."},
                {backend::Speaker::user, sentence(200, rng)}};
  for (auto _ : state) benchmark::DoNotOptimize(backend::request_digest(r));
}
BENCHMARK(BM_RequestDigest);

void BM_ParseJudgeReply(benchmark::State& state) {
  const std::string reply = "The reasoning is sound.\nCoherence: 8\nConsistency: 7\nScore: 8\n";
  for (auto _ : state) benchmark::DoNotOptimize(judge::parse_judge_reply(reply));
}
BENCHMARK(BM_ParseJudgeReply);

void BM_DpoGrad(benchmark::State& state) {
  const auto contexts = static_cast<std::size_t>(state.range(0));
  const std::size_t v = 6;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  toyalign::ToyPolicy policy, reference;
  policy.logits.assign(contexts, std::vector<double>(v));
  reference.logits.assign(contexts, std::vector<double>(v));
  for (std::size_t c = 0; c < contexts; ++c)
    for (std::size_t j = 0; j < v; ++j) {
      policy.logits[c][j] = d(rng);
      reference.logits[c][j] = d(rng);
    }
  std::vector<toyalign::DpoTriplet> triplets;
  for (std::size_t c = 0; c < contexts; ++c)
    for (std::size_t k = 0; k < 2; ++k) triplets.push_back({c, k, 3 + k});
  for (auto _ : state) benchmark::DoNotOptimize(toyalign::dpo_grad(policy, reference, triplets, 0.1));
}
BENCHMARK(BM_DpoGrad)->Arg(3)->Arg(100);

}  // namespace
BENCHMARK_MAIN();

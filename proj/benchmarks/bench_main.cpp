// Copyright 2026 The banglanlu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Microbenchmarks for the hot paths: tokenizing, featurizing, one training
// step of the joint model, single-message parsing and metric computation.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/diet.hpp"
#include "banglanlu/evaluation.hpp"
#include "banglanlu/featurize.hpp"
#include "banglanlu/pipeline.hpp"
#include "banglanlu/rng.hpp"
#include "banglanlu/tokenize.hpp"

namespace {

using namespace bnlu;

const Project& project() {
  static const Project p = [] {
    const SyntheticCorpus c = generate_synthetic_corpus(42, 12, 10, 3);
    return load_project(c.nlu, c.domain, c.stories);
  }();
  return p;
}

PipelineConfig short_config(const std::string& name, std::size_t epochs) {
  PipelineConfig config = preset(name);
  config.classifier.epochs = epochs;
  return config;
}

const NluPipeline& fitted_pipeline() {
  static const NluPipeline p = NluPipeline::fit(short_config("P8", 5), project().nlu, 42);
  return p;
}

constexpr const char* kMessages[] = {"আমি পাইথন কোর্স এর দাম জানতে চাই।", "ami python course er dam jante chai",
                                      "bkash e payment kora jabe?", "ধন্যবাদ"};

void BM_BanglaTokenize(benchmark::State& state) {
  for (auto _ : state) {
    for (const char* m : kMessages) benchmark::DoNotOptimize(bangla_tokenize(m));
  }
}
BENCHMARK(BM_BanglaTokenize);

void BM_Featurize(benchmark::State& state) {
  const NluPipeline& p = fitted_pipeline();
  for (auto _ : state) {
    for (const char* m : kMessages) benchmark::DoNotOptimize(p.featurize(m));
  }
}
BENCHMARK(BM_Featurize);

void BM_Parse(benchmark::State& state) {
  const NluPipeline& p = fitted_pipeline();
  for (auto _ : state) {
    for (const char* m : kMessages) benchmark::DoNotOptimize(p.parse(m));
  }
}
BENCHMARK(BM_Parse);

// One full-batch loss and gradient evaluation of the P8 model.
void BM_TrainingStep(benchmark::State& state) {
  const NluPipeline& p = fitted_pipeline();
  std::vector<MessageFeatures> features;
  for (const TrainingExample& e : project().nlu.examples) {
    features.push_back(p.featurize(e.text));
    if (features.size() == 32) break;
  }
  std::vector<LabeledMessage> batch;
  for (const MessageFeatures& f : features) {
    batch.push_back({&f, 0, std::vector<int>(f.tokens.size(), 0)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradients(p.model(), batch));
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

void BM_WeightedMetrics(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < k; ++i) cm.labels.push_back("c" + std::to_string(i));
  cm.counts.assign(k, std::vector<std::size_t>(k, 0));
  for (auto& row : cm.counts) {
    for (auto& c : row) c = rng.below(50);
  }
  for (auto _ : state) benchmark::DoNotOptimize(weighted_metrics(cm));
}
BENCHMARK(BM_WeightedMetrics)->Arg(12)->Arg(100);

}  // namespace

BENCHMARK_MAIN();

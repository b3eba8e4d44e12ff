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

#include "banglanlu/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <tuple>

#include "banglanlu/errors.hpp"

namespace bnlu {

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (std::size_t c : row) n += c;
  }
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
  return n;
}

ConfusionMatrix confusion(std::span<const std::string> golds, std::span<const std::string> preds,
                          std::vector<std::string> labels) {
  if (golds.size() != preds.size()) {
    throw Error(ErrorCode::InvalidArgument, "gold and prediction counts differ");
  }
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  const auto find = [&](const std::string& label) {
    const auto it = index.find(label);
    if (it == index.end()) throw Error(ErrorCode::UnknownLabel, "unknown label `" + label + "`");
    return it->second;
  };
  ConfusionMatrix cm;
  cm.counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t i = 0; i < golds.size(); ++i) ++cm.counts[find(golds[i])][find(preds[i])];
  cm.labels = std::move(labels);
  return cm;
}

MetricsRow weighted_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  const std::size_t k = cm.counts.size();
  MetricsRow row;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t support = 0;
    std::size_t predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += cm.counts[c][j];
      predicted += cm.counts[j][c];
    }
    if (support == 0) continue;
    const double tp = static_cast<double>(cm.counts[c][c]);
    const double precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    const double recall = tp / static_cast<double>(support);
    const double f1 =
        precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    const double w = static_cast<double>(support);
    row.weighted_precision += w * precision;
    row.weighted_recall += w * recall;
    row.weighted_f1 += w * f1;
  }
  const double n = static_cast<double>(total);
  row.weighted_precision /= n;
  row.weighted_recall /= n;
  row.weighted_f1 /= n;
  row.accuracy = static_cast<double>(cm.trace()) / n;
  return row;
}

std::size_t ConfidenceHistogram::total() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < correct.size(); ++i) n += correct[i] + wrong[i];
  return n;
}

ConfidenceHistogram confidence_histogram(std::span<const std::pair<bool, double>> results) {
  constexpr std::size_t bins = ConfidenceHistogram::kBins;
  ConfidenceHistogram h;
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  }
  h.correct.assign(bins, 0);
  h.wrong.assign(bins, 0);
  for (const auto& [ok, confidence] : results) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "confidence " + std::to_string(confidence) + " outside [0, 1]");
    }
    const auto bin =
        std::min(bins - 1, static_cast<std::size_t>(confidence * static_cast<double>(bins)));
    ++(ok ? h.correct : h.wrong)[bin];
  }
  return h;
}

namespace {

EntityMetrics entity_metrics(std::span<const std::vector<EntitySpan>> gold,
                             std::span<const std::vector<EntitySpan>> predicted) {
  EntityMetrics m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    m.gold += gold[i].size();
    m.predicted += predicted[i].size();
    for (const EntitySpan& p : predicted[i]) {
      const bool hit = std::any_of(gold[i].begin(), gold[i].end(), [&](const EntitySpan& g) {
        return std::tie(g.start, g.end, g.entity) == std::tie(p.start, p.end, p.entity);
      });
      m.matched += hit ? 1 : 0;
    }
  }
  m.precision = m.predicted == 0 ? 0.0 : static_cast<double>(m.matched) / static_cast<double>(m.predicted);
  m.recall = m.gold == 0 ? 0.0 : static_cast<double>(m.matched) / static_cast<double>(m.gold);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0
                                        : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

}  // namespace

EvaluationReport evaluate_fitted(const NluPipeline& pipeline, const TrainingSet& test) {
  if (test.examples.empty()) throw Error(ErrorCode::EmptyMatrix, "test set is empty");
  EvaluationReport report;
  report.pipeline = pipeline.config().name;
  report.loss_curve = pipeline.loss_curve();

  std::vector<std::string> labels = pipeline.model().intents();
  std::vector<std::string> golds;
  std::vector<std::string> preds;
  std::vector<std::pair<bool, double>> confidences;
  std::vector<std::vector<EntitySpan>> gold_entities;
  std::vector<std::vector<EntitySpan>> pred_entities;
  for (const TrainingExample& ex : test.examples) {
    ParseResult r = pipeline.parse(ex.text);
    PredictionRecord rec;
    rec.text = ex.text;
    rec.gold = ex.intent;
    rec.predicted = r.intent();
    rec.confidence = r.confidence();
    rec.fallback = r.fallback;
    rec.correct = rec.predicted == rec.gold;
    for (const std::string* l : {&rec.gold, &rec.predicted}) {
      if (std::find(labels.begin(), labels.end(), *l) == labels.end()) labels.push_back(*l);
    }
    golds.push_back(rec.gold);
    preds.push_back(rec.predicted);
    confidences.emplace_back(rec.correct, std::clamp(rec.confidence, 0.0, 1.0));
    gold_entities.push_back(ex.entities);
    pred_entities.push_back(std::move(r.entities));
    report.predictions.push_back(std::move(rec));
  }
  report.confusion = confusion(golds, preds, std::move(labels));
  report.metrics = weighted_metrics(report.confusion);
  report.histogram = confidence_histogram(confidences);
  report.entities = entity_metrics(gold_entities, pred_entities);
  return report;
}

EvaluationReport evaluate_pipeline(const PipelineConfig& config, const TrainingSet& train,
                                   const TrainingSet& test, std::uint64_t seed) {
  if (test.examples.empty()) throw Error(ErrorCode::EmptyMatrix, "test set is empty");
  return evaluate_fitted(NluPipeline::fit(config, train, seed), test);
}

AblationResult run_ablation(std::span<const PipelineConfig> configs, const TrainTestSplit& split,
                            std::uint64_t seed, std::size_t jobs) {
  if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "no pipelines to evaluate");
  const std::uint64_t hash = split_fingerprint(split);
  std::vector<AblationRow> rows(configs.size());
  std::vector<std::optional<EvaluationReport>> reports(configs.size());

  const auto run_one = [&](std::size_t i) {
    AblationRow& row = rows[i];
    row.name = configs[i].name;
    row.split_hash = hash;
    row.reference = configs[i].reference;
    try {
      reports[i] = evaluate_pipeline(configs[i], split.train, split.test, seed);
      row.metrics = reports[i]->metrics;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, configs.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) run_one(i);
      });
    }
    for (auto& t : threads) t.join();
  }

  AblationResult result;
  result.rows = std::move(rows);
  for (auto& r : reports) {
    if (r) result.reports.push_back(std::move(*r));
  }
  return result;
}

}  // namespace bnlu

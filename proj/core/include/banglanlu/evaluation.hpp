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

// Intent metrics, confusion matrices, confidence histograms, the
// pipeline evaluation protocol and the multi-pipeline ablation runner,
// plus CSV and SVG renderers for their results.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/pipeline.hpp"

namespace bnlu {

struct ConfusionMatrix {
  std::vector<std::string> labels;
  /// counts[gold][predicted], indices into labels.
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t trace() const;
};

/// Throws Error(InvalidArgument) on a length mismatch and
/// Error(UnknownLabel) for a label outside `labels`.
ConfusionMatrix confusion(std::span<const std::string> golds, std::span<const std::string> preds,
                          std::vector<std::string> labels);

struct MetricsRow {
  double accuracy = 0.0;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Per-class precision, recall and F1 (0 when a denominator is 0),
/// averaged with gold-support weights. Throws Error(EmptyMatrix).
MetricsRow weighted_metrics(const ConfusionMatrix& cm);

struct ConfidenceHistogram {
  static constexpr std::size_t kBins = 20;
  std::vector<double> edges;  // kBins + 1 uniform edges over [0, 1]
  std::vector<std::size_t> correct;
  std::vector<std::size_t> wrong;

  std::size_t total() const;
};

/// Bin i holds [i/20, (i+1)/20); the last bin also holds 1.0. Throws
/// Error(InvalidArgument) for a confidence outside [0, 1].
ConfidenceHistogram confidence_histogram(std::span<const std::pair<bool, double>> results);

struct PredictionRecord {
  std::string text;
  std::string gold;
  std::string predicted;
  double confidence = 0.0;
  FallbackReason fallback = FallbackReason::None;
  bool correct = false;
};

/// Exact (start, end, type) span matching, micro-averaged.
struct EntityMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;
};

struct EvaluationReport {
  std::string pipeline;
  MetricsRow metrics;
  ConfusionMatrix confusion;
  ConfidenceHistogram histogram;
  EntityMetrics entities;
  std::vector<double> loss_curve;
  std::vector<PredictionRecord> predictions;
};

/// Scores a fitted pipeline on `test`. A fallback prediction is wrong
/// unless the gold intent is the fallback intent itself. Throws
/// Error(EmptyMatrix) for an empty test set.
EvaluationReport evaluate_fitted(const NluPipeline& pipeline, const TrainingSet& test);

/// Fits on `train` with `seed`, then evaluate_fitted on `test`.
EvaluationReport evaluate_pipeline(const PipelineConfig& config, const TrainingSet& train,
                                   const TrainingSet& test, std::uint64_t seed);

struct AblationRow {
  std::string name;
  std::optional<MetricsRow> metrics;  // empty when the pipeline failed
  std::string error;
  std::uint64_t split_hash = 0;
  std::optional<ReferenceMetrics> reference;
};

struct AblationResult {
  std::vector<AblationRow> rows;            // config order
  std::vector<EvaluationReport> reports;    // successful pipelines, config order
};

/// Evaluates every config on the same split with the same seed. A failing
/// config becomes a failed row; the rest still run. `jobs` > 1 evaluates
/// pipelines concurrently without changing any result.
AblationResult run_ablation(std::span<const PipelineConfig> configs, const TrainTestSplit& split,
                            std::uint64_t seed, std::size_t jobs = 1);

// --- report files ------------------------------------------------------------

/// `pipeline,accuracy,precision,recall,f1`, 4 decimal places; failed rows
/// carry `failed` in every metric column.
std::string metrics_csv(std::span<const AblationRow> rows);
/// Split hash, status, error and reference figures per row.
std::string ablation_details_csv(std::span<const AblationRow> rows);
/// Header row and first column hold the labels.
std::string confusion_csv(const ConfusionMatrix& cm);
/// `bin_lo,bin_hi,correct,wrong`.
std::string histogram_csv(const ConfidenceHistogram& h);
/// `text,gold,predicted,confidence,fallback,correct`.
std::string predictions_csv(std::span<const PredictionRecord> predictions);
std::string loss_curve_csv(std::span<const double> curve);

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title);
std::string histogram_svg(const ConfidenceHistogram& h, const std::string& title);

/// Writes metrics.csv, confusion.csv, histogram.csv, predictions.csv,
/// loss.csv, confusion.svg and histogram.svg into `dir` (created if
/// missing).
void write_report(const EvaluationReport& report, const std::string& dir);

}  // namespace bnlu

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

// CSV and SVG renderers for evaluation results. All numbers are printed
// with fixed precision so repeated runs produce identical bytes.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "banglanlu/errors.hpp"
#include "banglanlu/evaluation.hpp"

namespace bnlu {

namespace {

std::string fixed(double v, int places = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string metrics_csv(std::span<const AblationRow> rows) {
  std::string out = "pipeline,accuracy,precision,recall,f1\n";
  for (const AblationRow& r : rows) {
    out += csv_field(r.name);
    if (r.metrics) {
      for (double v : {r.metrics->accuracy, r.metrics->weighted_precision,
                       r.metrics->weighted_recall, r.metrics->weighted_f1}) {
        out += ',' + fixed(v);
      }
    } else {
      out += ",failed,failed,failed,failed";
    }
    out += '\n';
  }
  return out;
}

std::string ablation_details_csv(std::span<const AblationRow> rows) {
  std::string out =
      "pipeline,split_hash,status,error,reference_accuracy,reference_precision,"
      "reference_recall,reference_f1\n";
  for (const AblationRow& r : rows) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.split_hash));
    out += csv_field(r.name) + ',' + hash + ',' + (r.metrics ? "ok" : "failed") + ',' +
           csv_field(r.error);
    if (r.reference) {
      for (double v : {r.reference->accuracy, r.reference->precision, r.reference->recall,
                       r.reference->f1}) {
        out += ',' + fixed(v, 2);
      }
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "gold\\predicted";
  for (const auto& l : cm.labels) out += ',' + csv_field(l);
  out += '\n';
  for (std::size_t g = 0; g < cm.labels.size(); ++g) {
    out += csv_field(cm.labels[g]);
    for (std::size_t c : cm.counts[g]) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const ConfidenceHistogram& h) {
  std::string out = "bin_lo,bin_hi,correct,wrong\n";
  for (std::size_t i = 0; i < h.correct.size(); ++i) {
    out += fixed(h.edges[i], 2) + ',' + fixed(h.edges[i + 1], 2) + ',' +
           std::to_string(h.correct[i]) + ',' + std::to_string(h.wrong[i]) + '\n';
  }
  return out;
}

std::string predictions_csv(std::span<const PredictionRecord> predictions) {
  std::string out = "text,gold,predicted,confidence,fallback,correct\n";
  for (const PredictionRecord& p : predictions) {
    out += csv_field(p.text) + ',' + csv_field(p.gold) + ',' + csv_field(p.predicted) + ',' +
           fixed(p.confidence) + ',' + std::string(to_string(p.fallback)) + ',' +
           (p.correct ? "true" : "false") + '\n';
  }
  return out;
}

std::string loss_curve_csv(std::span<const double> curve) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += std::to_string(i + 1) + ',' + fixed(curve[i], 6) + '\n';
  }
  return out;
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title) {
  const std::size_t n = cm.labels.size();
  const int cell = 28;
  const int margin = 170;
  const int size = margin + static_cast<int>(n) * cell + 20;
  std::size_t peak = 1;
  for (const auto& row : cm.counts) {
    for (std::size_t c : row) peak = std::max(peak, c);
  }
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 30
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"10\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int pos = margin + static_cast<int>(i) * cell;
    s << "<text x=\"" << margin - 6 << "\" y=\"" << pos + cell / 2 + 34
      << "\" text-anchor=\"end\">" << xml_escape(cm.labels[i]) << "</text>\n";
    s << "<text transform=\"translate(" << pos + cell / 2 + 4 << "," << margin + 24
      << ") rotate(-60)\">" << xml_escape(cm.labels[i]) << "</text>\n";
  }
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t c = cm.counts[g][p];
      const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(c) /
                                               static_cast<double>(peak));
      const int x = margin + static_cast<int>(p) * cell;
      const int y = margin + 30 + static_cast<int>(g) * cell;
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
        << "\" fill=\"rgb(" << shade << "," << shade << ",255)\" stroke=\"#ccc\"/>";
      if (c > 0) {
        s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
          << "\" text-anchor=\"middle\">" << c << "</text>";
      }
      s << '\n';
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::string histogram_svg(const ConfidenceHistogram& h, const std::string& title) {
  const int bar = 24;
  const int height = 200;
  const int left = 40;
  const int top = 40;
  const std::size_t bins = h.correct.size();
  std::size_t peak = 1;
  for (std::size_t i = 0; i < bins; ++i) peak = std::max({peak, h.correct[i], h.wrong[i]});
  const int width = left + static_cast<int>(bins) * bar + 20;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << top + height + 50 << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"10\" y=\"20\" font-size=\"14\">" << xml_escape(title) << "</text>\n"
    << "<text x=\"" << width - 150 << "\" y=\"20\" fill=\"#2a7\">correct</text>"
    << "<text x=\"" << width - 90 << "\" y=\"20\" fill=\"#c33\">wrong</text>\n";
  const auto scaled = [&](std::size_t c) {
    return static_cast<int>(static_cast<double>(height) * static_cast<double>(c) /
                            static_cast<double>(peak));
  };
  for (std::size_t i = 0; i < bins; ++i) {
    const int x = left + static_cast<int>(i) * bar;
    const int hc = scaled(h.correct[i]);
    const int hw = scaled(h.wrong[i]);
    s << "<rect x=\"" << x + 2 << "\" y=\"" << top + height - hc << "\" width=\"" << bar / 2 - 2
      << "\" height=\"" << hc << "\" fill=\"#2a7\"/>"
      << "<rect x=\"" << x + bar / 2 << "\" y=\"" << top + height - hw << "\" width=\""
      << bar / 2 - 2 << "\" height=\"" << hw << "\" fill=\"#c33\"/>\n";
    if (i % 5 == 0) {
      s << "<text x=\"" << x << "\" y=\"" << top + height + 15 << "\">" << fixed(h.edges[i], 2)
        << "</text>\n";
    }
  }
  s << "<text x=\"" << left + static_cast<int>(bins) * bar - 20 << "\" y=\"" << top + height + 15
    << "\">1.00</text>\n"
    << "<line x1=\"" << left << "\" y1=\"" << top + height << "\" x2=\""
    << left + static_cast<int>(bins) * bar << "\" y2=\"" << top + height
    << "\" stroke=\"black\"/>\n</svg>\n";
  return s.str();
}

void write_report(const EvaluationReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create `" + dir + "`: " + ec.message());
  const std::filesystem::path base(dir);
  AblationRow row;
  row.name = report.pipeline;
  row.metrics = report.metrics;
  write_file((base / "metrics.csv").string(), metrics_csv(std::span(&row, 1)));
  write_file((base / "confusion.csv").string(), confusion_csv(report.confusion));
  write_file((base / "histogram.csv").string(), histogram_csv(report.histogram));
  write_file((base / "predictions.csv").string(), predictions_csv(report.predictions));
  write_file((base / "loss.csv").string(), loss_curve_csv(report.loss_curve));
  write_file((base / "confusion.svg").string(),
             confusion_svg(report.confusion, report.pipeline + " confusion matrix"));
  write_file((base / "histogram.svg").string(),
             histogram_svg(report.histogram, report.pipeline + " intent confidence"));
}

}  // namespace bnlu

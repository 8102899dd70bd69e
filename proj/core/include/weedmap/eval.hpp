#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "weedmap/core.hpp"

namespace weedmap {

// Rows = true class, columns = predicted class, both in WeedClass ordinal
// order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t row_sum(WeedClass cls) const;   // support of the class
  std::uint64_t col_sum(WeedClass cls) const;   // times the class was predicted

  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;

  bool operator==(const ClassMetrics&) const = default;
};

using PerClassMetrics = std::array<ClassMetrics, kNumClasses>;

struct ReportMetadata {
  std::string model_kind;
  std::map<std::string, std::string> hyperparams;
  std::uint64_t seed = 0;
  std::string dataset_id;

  bool operator==(const ReportMetadata&) const = default;
};

struct EvaluationReport {
  ConfusionMatrix confusion;
  PerClassMetrics per_class{};
  double weighted_f1 = 0.0;
  ReportMetadata metadata;

  bool operator==(const EvaluationReport&) const = default;
};

ConfusionMatrix confusion_matrix(const std::vector<WeedClass>& y_true,
                                 const std::vector<WeedClass>& y_pred);

// precision = diag/col-sum, recall = diag/row-sum, f1 = harmonic mean;
// every zero denominator yields 0, never NaN.
PerClassMetrics per_class_metrics(const ConfusionMatrix& cm);

// Support-weighted mean of per-class F1. Throws ZeroSupport when no class
// has support.
double weighted_f1(const PerClassMetrics& metrics);

EvaluationReport make_report(const ConfusionMatrix& cm, ReportMetadata metadata);

// format is one of "text", "json", "csv". Text rounds to 2 decimals;
// json/csv keep full precision and round-trip.
std::string render_report(const EvaluationReport& report, const std::string& format);

EvaluationReport parse_report_json(const std::string& text);

// Counts grid with a header row and column of class codes.
std::string confusion_matrix_csv(const ConfusionMatrix& cm);

}  // namespace weedmap

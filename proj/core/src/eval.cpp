#include "weedmap/eval.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace weedmap {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (std::uint64_t v : row) sum += v;
  }
  return sum;
}

std::uint64_t ConfusionMatrix::row_sum(WeedClass cls) const {
  std::uint64_t sum = 0;
  for (std::uint64_t v : counts[static_cast<std::size_t>(cls)]) sum += v;
  return sum;
}

std::uint64_t ConfusionMatrix::col_sum(WeedClass cls) const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) sum += row[static_cast<std::size_t>(cls)];
  return sum;
}

ConfusionMatrix confusion_matrix(const std::vector<WeedClass>& y_true,
                                 const std::vector<WeedClass>& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(y_true.size()) + " labels vs " +
                    std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) {
    throw Error(ErrorCode::EmptyInput, "nothing to evaluate");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    cm.counts[static_cast<std::size_t>(y_true[i])]
             [static_cast<std::size_t>(y_pred[i])]++;
  }
  return cm;
}

namespace {

double safe_ratio(double numerator, double denominator) {
  return denominator == 0.0 ? 0.0 : numerator / denominator;
}

}  // namespace

PerClassMetrics per_class_metrics(const ConfusionMatrix& cm) {
  PerClassMetrics metrics{};
  for (WeedClass cls : all_weed_classes()) {
    const auto c = static_cast<std::size_t>(cls);
    const double diag = static_cast<double>(cm.counts[c][c]);
    ClassMetrics& m = metrics[c];
    m.support = cm.row_sum(cls);
    m.precision = safe_ratio(diag, static_cast<double>(cm.col_sum(cls)));
    m.recall = safe_ratio(diag, static_cast<double>(m.support));
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  }
  return metrics;
}

double weighted_f1(const PerClassMetrics& metrics) {
  double weighted_sum = 0.0;
  double total_support = 0.0;
  for (const ClassMetrics& m : metrics) {
    weighted_sum += static_cast<double>(m.support) * m.f1;
    total_support += static_cast<double>(m.support);
  }
  if (total_support == 0.0) {
    throw Error(ErrorCode::ZeroSupport, "no class has any support");
  }
  return weighted_sum / total_support;
}

EvaluationReport make_report(const ConfusionMatrix& cm, ReportMetadata metadata) {
  EvaluationReport report;
  report.confusion = cm;
  report.per_class = per_class_metrics(cm);
  report.weighted_f1 = weighted_f1(report.per_class);
  report.metadata = std::move(metadata);
  return report;
}

namespace {

std::string render_text(const EvaluationReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-22s %9s %9s %9s %9s\n", "class", "precision",
                "recall", "f1", "support");
  out << line;
  for (WeedClass cls : all_weed_classes()) {
    const auto c = static_cast<std::size_t>(cls);
    const ClassMetrics& m = report.per_class[c];
    const std::string name = weed_class_name(cls) + " (" + weed_class_code(cls) + ")";
    std::snprintf(line, sizeof(line), "%-22s %9.2f %9.2f %9.2f %9" PRIu64 "\n",
                  name.c_str(), m.precision, m.recall, m.f1, m.support);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-22s %29.2f\n", "weighted F1",
                report.weighted_f1);
  out << line;

  out << "\nconfusion matrix (rows = true, columns = predicted)\n";
  std::snprintf(line, sizeof(line), "%-6s", "");
  out << line;
  for (WeedClass cls : all_weed_classes()) {
    std::snprintf(line, sizeof(line), "%6s", weed_class_code(cls).c_str());
    out << line;
  }
  out << "\n";
  for (WeedClass row : all_weed_classes()) {
    std::snprintf(line, sizeof(line), "%-6s", weed_class_code(row).c_str());
    out << line;
    for (WeedClass col : all_weed_classes()) {
      std::snprintf(line, sizeof(line), "%6" PRIu64,
                    report.confusion.counts[static_cast<std::size_t>(row)]
                                           [static_cast<std::size_t>(col)]);
      out << line;
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json j;
  j["confusion"] = report.confusion.counts;
  nlohmann::json per_class = nlohmann::json::object();
  for (WeedClass cls : all_weed_classes()) {
    const ClassMetrics& m = report.per_class[static_cast<std::size_t>(cls)];
    per_class[weed_class_code(cls)] = {{"precision", m.precision},
                                       {"recall", m.recall},
                                       {"f1", m.f1},
                                       {"support", m.support}};
  }
  j["per_class"] = per_class;
  j["weighted_f1"] = report.weighted_f1;
  j["metadata"] = {{"model_kind", report.metadata.model_kind},
                   {"hyperparams", report.metadata.hyperparams},
                   {"seed", report.metadata.seed},
                   {"dataset_id", report.metadata.dataset_id}};
  return j;
}

std::string render_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "class,precision,recall,f1,support\n";
  char number[64];
  for (WeedClass cls : all_weed_classes()) {
    const ClassMetrics& m = report.per_class[static_cast<std::size_t>(cls)];
    out << weed_class_name(cls);
    std::snprintf(number, sizeof(number), ",%.17g,%.17g,%.17g,%" PRIu64 "\n",
                  m.precision, m.recall, m.f1, m.support);
    out << number;
  }
  return out.str();
}

}  // namespace

std::string render_report(const EvaluationReport& report, const std::string& format) {
  if (format == "text") return render_text(report);
  if (format == "json") return report_to_json(report).dump(2) + "\n";
  if (format == "csv") return render_csv(report);
  throw Error(ErrorCode::UnsupportedFormat,
              "report format '" + format + "' (expected text, json or csv)");
}

EvaluationReport parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report json: ") + e.what());
  }
  EvaluationReport report;
  try {
    j.at("confusion").get_to(report.confusion.counts);
    for (WeedClass cls : all_weed_classes()) {
      const auto& m = j.at("per_class").at(weed_class_code(cls));
      ClassMetrics& out = report.per_class[static_cast<std::size_t>(cls)];
      m.at("precision").get_to(out.precision);
      m.at("recall").get_to(out.recall);
      m.at("f1").get_to(out.f1);
      m.at("support").get_to(out.support);
    }
    j.at("weighted_f1").get_to(report.weighted_f1);
    const auto& meta = j.at("metadata");
    meta.at("model_kind").get_to(report.metadata.model_kind);
    meta.at("hyperparams").get_to(report.metadata.hyperparams);
    meta.at("seed").get_to(report.metadata.seed);
    meta.at("dataset_id").get_to(report.metadata.dataset_id);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report json: ") + e.what());
  }
  return report;
}

std::string confusion_matrix_csv(const ConfusionMatrix& cm) {
  std::ostringstream out;
  out << "class";
  for (WeedClass cls : all_weed_classes()) out << "," << weed_class_code(cls);
  out << "\n";
  for (WeedClass row : all_weed_classes()) {
    out << weed_class_code(row);
    for (WeedClass col : all_weed_classes()) {
      out << ","
          << cm.counts[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace weedmap

#include "opc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "opc/error.hpp"

namespace opc {

namespace {

constexpr std::size_t kNameWidth = 20;

std::string fit_name(const std::string& name) {
  if (name.size() <= kNameWidth) return name;
  return name.substr(0, kNameWidth - 3) + "...";
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", v * 100.0);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted_labels,
                          std::size_t k) {
  if (true_labels.size() != predicted_labels.size()) {
    throw Error(Errc::LengthMismatch, std::to_string(true_labels.size()) + " true labels vs " +
                                          std::to_string(predicted_labels.size()) + " predictions");
  }
  ConfusionMatrix cm{k, std::vector<std::size_t>(k * k, 0)};
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted_labels[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= k || static_cast<std::size_t>(p) >= k) {
      throw Error(Errc::LabelOutOfRange, "label pair (" + std::to_string(t) + ", " + std::to_string(p) +
                                             ") outside [0, " + std::to_string(k) + ")");
    }
    ++cm.counts[static_cast<std::size_t>(t) * k + static_cast<std::size_t>(p)];
  }
  return cm;
}

MetricsReport compute_report(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error(Errc::EmptyMatrix, "confusion matrix holds no samples");
  const std::size_t k = cm.k;

  MetricsReport r;
  r.matrix = cm;
  r.precision.assign(k, 0.0);
  r.recall.assign(k, 0.0);
  r.f1.assign(k, 0.0);
  r.support.assign(k, 0);

  std::size_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row_sum = 0, col_sum = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row_sum += cm.at(c, j);
      col_sum += cm.at(j, c);
    }
    const auto diag = static_cast<double>(cm.at(c, c));
    trace += cm.at(c, c);
    r.support[c] = row_sum;
    r.precision[c] = col_sum ? diag / static_cast<double>(col_sum) : 0.0;
    r.recall[c] = row_sum ? diag / static_cast<double>(row_sum) : 0.0;
    const double denom = r.precision[c] + r.recall[c];
    r.f1[c] = denom > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / denom : 0.0;
  }

  const auto n = static_cast<double>(total);
  r.accuracy = static_cast<double>(trace) / n;
  for (std::size_t c = 0; c < k; ++c) {
    const double w = static_cast<double>(r.support[c]) / n;
    r.weighted_precision += w * r.precision[c];
    r.weighted_recall += w * r.recall[c];
    r.weighted_f1 += w * r.f1[c];
  }
  return r;
}

std::string render_report(const MetricsReport& report, std::span<const std::string> class_names) {
  const std::size_t k = report.matrix.k;
  std::ostringstream out;
  const std::size_t col = 11;

  out << pad_right("class", kNameWidth) << pad_left("precision", col) << pad_left("recall", col)
      << pad_left("f1", col) << pad_left("support", col) << '\n';
  for (std::size_t c = 0; c < k; ++c) {
    const std::string name = c < class_names.size() ? class_names[c] : std::to_string(c);
    out << pad_right(fit_name(name), kNameWidth) << pad_left(pct(report.precision[c]), col)
        << pad_left(pct(report.recall[c]), col) << pad_left(pct(report.f1[c]), col)
        << pad_left(std::to_string(report.support[c]), col) << '\n';
  }
  out << pad_right("weighted avg", kNameWidth) << pad_left(pct(report.weighted_precision), col)
      << pad_left(pct(report.weighted_recall), col) << pad_left(pct(report.weighted_f1), col)
      << pad_left(std::to_string(report.matrix.total()), col) << '\n';
  out << pad_right("accuracy", kNameWidth) << pad_left(pct(report.accuracy), col) << "\n\n";

  out << "confusion matrix (rows = true, cols = predicted)\n";
  out << pad_right("", kNameWidth);
  for (std::size_t c = 0; c < k; ++c) out << pad_left(std::to_string(c), 8);
  out << '\n';
  for (std::size_t t = 0; t < k; ++t) {
    const std::string name = t < class_names.size() ? class_names[t] : std::to_string(t);
    out << pad_right(fit_name(name), kNameWidth);
    for (std::size_t p = 0; p < k; ++p) out << pad_left(std::to_string(report.matrix.at(t, p)), 8);
    out << '\n';
  }
  return out.str();
}

nlohmann::json report_to_json(const MetricsReport& report, std::span<const std::string> class_names) {
  std::vector<std::vector<std::size_t>> rows(report.matrix.k);
  for (std::size_t t = 0; t < report.matrix.k; ++t) {
    for (std::size_t p = 0; p < report.matrix.k; ++p) rows[t].push_back(report.matrix.at(t, p));
  }
  return nlohmann::json{
      {"classes", std::vector<std::string>(class_names.begin(), class_names.end())},
      {"accuracy", report.accuracy},
      {"precision", report.precision},
      {"recall", report.recall},
      {"f1", report.f1},
      {"support", report.support},
      {"weighted_precision", report.weighted_precision},
      {"weighted_recall", report.weighted_recall},
      {"weighted_f1", report.weighted_f1},
      {"confusion_matrix", rows}};
}

}  // namespace opc

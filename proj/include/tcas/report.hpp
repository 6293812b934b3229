#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcas/eval.hpp"

namespace tcas::eval {

inline constexpr int kReportSchemaVersion = 1;

struct ReportRow {
  std::string user;
  std::string algorithm;
  std::string mode;      // vanilla | gan
  std::string scenario;  // zero_effort | population_same | population_different
  double far = 0;
  double frr = 0;
  double hter = 0;
  std::size_t genuine = 0;   // genuine windows scored (zero-effort rows only)
  std::size_t impostor = 0;  // attack vectors scored
};

/// Rows are kept sorted by (user, algorithm, mode, scenario). `meta` carries
/// dataset ids, seeds and the run configuration; `users` carries per-user
/// training details (selected hyperparameters, CV scores, GAN curves).
struct EvalReport {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<ReportRow> rows;
  nlohmann::json users = nlohmann::json::object();

  void sort_rows();
};

/// Unweighted mean over users of one (algorithm, mode, scenario) cell.
struct SummaryRow {
  std::string algorithm, mode, scenario;
  double far = 0, frr = 0, hter = 0;
  std::size_t users = 0;
};

std::vector<SummaryRow> summarize(const EvalReport& r);

/// Population FAR minus zero-effort FAR for the same (user, algorithm, mode).
struct FarIncrease {
  std::string user, algorithm, mode, scenario;
  double delta = 0;
};

std::vector<FarIncrease> far_increases(const EvalReport& r);

/// Mean over users of far_increases, keyed by (algorithm, mode, scenario).
std::vector<FarIncrease> mean_far_increases(const EvalReport& r);

nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

/// Table with one column pair (V-TCAS, G-TCAS) per classifier and FRR/FAR/HTER
/// rows per scenario, followed by the mean FAR increase per classifier.
std::string to_markdown(const EvalReport& r);
/// One line per report row.
std::string to_csv(const EvalReport& r);

/// `label,pc1,pc2`
void write_pca_csv(std::ostream& out, const std::vector<std::string>& labels, const Matrix& projected);

}  // namespace tcas::eval

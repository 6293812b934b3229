#include "tcas/report.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "tcas/csv.hpp"

namespace tcas::eval {

using nlohmann::json;

namespace {

auto key(const ReportRow& r) { return std::tie(r.user, r.algorithm, r.mode, r.scenario); }

const std::vector<std::string> kAlgoOrder = {"svm", "random_forest", "mlp", "gbt"};
const std::vector<std::string> kModeOrder = {"vanilla", "gan"};
const std::vector<std::string> kScenarioOrder = {"zero_effort", "population_same",
                                                 "population_different"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

void EvalReport::sort_rows() {
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) { return key(a) < key(b); });
}

std::vector<SummaryRow> summarize(const EvalReport& r) {
  std::map<std::tuple<std::string, std::string, std::string>, SummaryRow> acc;
  for (const auto& row : r.rows) {
    auto& s = acc[{row.algorithm, row.mode, row.scenario}];
    s.algorithm = row.algorithm;
    s.mode = row.mode;
    s.scenario = row.scenario;
    s.far += row.far;
    s.frr += row.frr;
    s.hter += row.hter;
    ++s.users;
  }
  std::vector<SummaryRow> out;
  for (auto& [k, s] : acc) {
    const auto n = static_cast<double>(s.users);
    s.far /= n;
    s.frr /= n;
    s.hter /= n;
    out.push_back(s);
  }
  return out;
}

std::vector<FarIncrease> far_increases(const EvalReport& r) {
  std::map<std::tuple<std::string, std::string, std::string>, double> zero;
  for (const auto& row : r.rows)
    if (row.scenario == "zero_effort") zero[{row.user, row.algorithm, row.mode}] = row.far;
  std::vector<FarIncrease> out;
  for (const auto& row : r.rows) {
    if (row.scenario == "zero_effort") continue;
    auto it = zero.find({row.user, row.algorithm, row.mode});
    if (it == zero.end()) continue;
    out.push_back({row.user, row.algorithm, row.mode, row.scenario, row.far - it->second});
  }
  return out;
}

std::vector<FarIncrease> mean_far_increases(const EvalReport& r) {
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, int>> acc;
  for (const auto& d : far_increases(r)) {
    auto& a = acc[{d.algorithm, d.mode, d.scenario}];
    a.first += d.delta;
    ++a.second;
  }
  std::vector<FarIncrease> out;
  for (const auto& [k, a] : acc)
    out.push_back({"", std::get<0>(k), std::get<1>(k), std::get<2>(k), a.first / a.second});
  return out;
}

json to_json(const EvalReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"user", x.user},
                    {"algorithm", x.algorithm},
                    {"mode", x.mode},
                    {"scenario", x.scenario},
                    {"far", x.far},
                    {"frr", x.frr},
                    {"hter", x.hter},
                    {"genuine", x.genuine},
                    {"impostor", x.impostor}});
  json summary = json::array();
  for (const auto& s : summarize(r))
    summary.push_back({{"algorithm", s.algorithm},
                       {"mode", s.mode},
                       {"scenario", s.scenario},
                       {"far", s.far},
                       {"frr", s.frr},
                       {"hter", s.hter},
                       {"users", s.users}});
  json deltas = json::array();
  for (const auto& d : mean_far_increases(r))
    deltas.push_back({{"algorithm", d.algorithm}, {"mode", d.mode}, {"scenario", d.scenario},
                      {"far_increase", d.delta}});
  json per_user = json::array();
  for (const auto& d : far_increases(r))
    per_user.push_back({{"user", d.user}, {"algorithm", d.algorithm}, {"mode", d.mode},
                        {"scenario", d.scenario}, {"far_increase", d.delta}});
  return {{"schema_version", kReportSchemaVersion},
          {"meta", r.meta},
          {"rows", rows},
          {"summary", summary},
          {"far_increase", deltas},
          {"far_increase_per_user", per_user},
          {"users", r.users}};
}

EvalReport report_from_json(const json& j) {
  if (!j.is_object() || j.value("schema_version", -1) != kReportSchemaVersion)
    throw SchemaVersionError("report schema_version missing or unsupported");
  EvalReport r;
  try {
    r.meta = j.at("meta");
    r.users = j.value("users", json::object());
    for (const auto& x : j.at("rows"))
      r.rows.push_back({x.at("user").get<std::string>(), x.at("algorithm").get<std::string>(),
                        x.at("mode").get<std::string>(), x.at("scenario").get<std::string>(),
                        x.at("far").get<double>(), x.at("frr").get<double>(),
                        x.at("hter").get<double>(), x.at("genuine").get<std::size_t>(),
                        x.at("impostor").get<std::size_t>()});
  } catch (const json::exception& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  r.sort_rows();
  return r;
}

std::string to_markdown(const EvalReport& r) {
  std::map<std::tuple<std::string, std::string, std::string>, SummaryRow> cell;
  for (const auto& s : summarize(r)) cell[{s.algorithm, s.mode, s.scenario}] = s;
  std::map<std::tuple<std::string, std::string, std::string>, double> inc;
  for (const auto& d : mean_far_increases(r)) inc[{d.algorithm, d.mode, d.scenario}] = d.delta;

  const std::map<std::string, std::string> algo_title = {
      {"svm", "SVM"}, {"random_forest", "RForest"}, {"mlp", "MLP"}, {"gbt", "XGBoost"}};
  const std::map<std::string, std::string> scen_title = {
      {"zero_effort", "Zero-effort"},
      {"population_same", "Population (Same)"},
      {"population_different", "Population (Different)"}};
  std::vector<std::string> algos;
  for (const auto& a : kAlgoOrder)
    for (const auto& m : kModeOrder)
      if (cell.count({a, m, "zero_effort"})) {
        algos.push_back(a);
        break;
      }
  const std::string device = r.meta.value("device", std::string("?"));

  std::ostringstream out;
  out << "| Device | Scenario | Metric |";
  for (const auto& a : algos) out << ' ' << algo_title.at(a) << " V-TCAS | " << algo_title.at(a) << " G-TCAS |";
  out << "\n|---|---|---|";
  for (std::size_t i = 0; i < algos.size(); ++i) out << "---|---|";
  out << '\n';
  auto value = [&](const std::string& a, const std::string& m, const std::string& s,
                   const std::string& metric) -> std::string {
    auto it = cell.find({a, m, s});
    if (it == cell.end()) return "-";
    const auto& c = it->second;
    return fmt(metric == "FAR" ? c.far : metric == "FRR" ? c.frr : c.hter);
  };
  for (const auto& s : kScenarioOrder) {
    bool present = false;
    for (const auto& [k, c] : cell) present |= std::get<2>(k) == s;
    if (!present) continue;
    const std::vector<std::string> metrics =
        s == "zero_effort" ? std::vector<std::string>{"FRR", "FAR", "HTER"}
                           : std::vector<std::string>{"FAR", "HTER"};
    for (const auto& metric : metrics) {
      out << "| " << device << " | " << scen_title.at(s) << " | " << metric << " |";
      for (const auto& a : algos)
        for (const auto& m : kModeOrder) out << ' ' << value(a, m, s, metric) << " |";
      out << '\n';
    }
  }
  if (!inc.empty()) {
    out << "\nMean FAR increase over zero-effort:\n\n| Scenario | Classifier | V-TCAS | G-TCAS |\n|---|---|---|---|\n";
    for (const auto& s : kScenarioOrder)
      for (const auto& a : algos) {
        auto v = inc.find({a, "vanilla", s});
        auto g = inc.find({a, "gan", s});
        if (v == inc.end() && g == inc.end()) continue;
        out << "| " << scen_title.at(s) << " | " << algo_title.at(a) << " | "
            << (v != inc.end() ? fmt(v->second) : "-") << " | "
            << (g != inc.end() ? fmt(g->second) : "-") << " |\n";
      }
  }
  return out.str();
}

std::string to_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "user_id,algorithm,mode,scenario,far,frr,hter,genuine,impostor\n";
  for (const auto& x : r.rows)
    out << x.user << ',' << x.algorithm << ',' << x.mode << ',' << x.scenario << ','
        << csv::format(x.far) << ',' << csv::format(x.frr) << ',' << csv::format(x.hter) << ','
        << x.genuine << ',' << x.impostor << '\n';
  return out.str();
}

void write_pca_csv(std::ostream& out, const std::vector<std::string>& labels, const Matrix& projected) {
  out << "label,pc1,pc2\n";
  for (Eigen::Index i = 0; i < projected.rows(); ++i)
    out << labels[static_cast<std::size_t>(i)] << ',' << csv::format(projected(i, 0)) << ','
        << csv::format(projected(i, 1)) << '\n';
}

}  // namespace tcas::eval

#include "tcas/windowing.hpp"

#include "tcas/errors.hpp"

namespace tcas::windowing {

void WindowConfig::validate() const {
  if (p < 1) throw ConfigError("window.p must be >= 1");
  if (q < 1 || q > p) throw ConfigError("window.q must satisfy 1 <= q <= p");
}

features::FeatureVector WindowSample::as_feature_vector() const {
  features::FeatureVector f;
  f.user = user;
  f.device = device;
  f.id = window_id;
  f.values = vector;
  return f;
}

std::vector<WindowSample> windows(const std::vector<features::FeatureVector>& rows,
                                  const WindowConfig& cfg) {
  cfg.validate();
  std::vector<WindowSample> out;
  if (rows.size() < cfg.p) return out;
  const std::size_t count = (rows.size() - cfg.p) / cfg.q + 1;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * cfg.q;
    WindowSample s;
    s.user = rows[start].user;
    s.device = rows[start].device;
    s.window_id = static_cast<int>(w);
    FeatureRow sum = FeatureRow::Zero();
    bool identical = true;
    for (std::size_t i = start; i < start + cfg.p; ++i) {
      sum += rows[i].values;
      identical = identical && rows[i].values == rows[start].values;
      s.members.push_back(rows[i].id);
    }
    // Exact for identical members (a mean of equal doubles need not round back).
    s.vector = identical ? rows[start].values : FeatureRow(sum / static_cast<double>(cfg.p));
    out.push_back(std::move(s));
  }
  return out;
}

WindowSet windows(const features::FeatureSet& set, const WindowConfig& cfg,
                  std::vector<std::string>* warnings) {
  WindowSet out;
  for (const auto& [user, rows] : set) {
    out[user] = windows(rows, cfg);
    if (rows.size() < cfg.p && warnings)
      warnings->push_back("user " + user + " has " + std::to_string(rows.size()) +
                          " swipes, fewer than the window size; no windows");
  }
  return out;
}

WindowSet from_feature_set(const features::FeatureSet& set) {
  WindowSet out;
  for (const auto& [user, rows] : set) {
    auto& v = out[user];
    for (const auto& f : rows) {
      WindowSample s;
      s.user = f.user;
      s.device = f.device;
      s.window_id = f.id;
      s.vector = f.values;
      v.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<features::FeatureVector> flatten(const WindowSet& set) {
  std::vector<features::FeatureVector> out;
  for (const auto& [_, rows] : set)
    for (const auto& w : rows) out.push_back(w.as_feature_vector());
  return out;
}

Matrix stack(const std::vector<WindowSample>& rows) {
  Matrix X(static_cast<Eigen::Index>(rows.size()), kNumFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = rows[i].vector;
  return X;
}

}  // namespace tcas::windowing

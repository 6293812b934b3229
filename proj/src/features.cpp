#include "tcas/features.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "tcas/csv.hpp"
#include "tcas/errors.hpp"

namespace tcas::features {

int feature_index(std::string_view name) {
  for (int i = 0; i < kNumFeatures; ++i)
    if (kFeatureNames[static_cast<std::size_t>(i)] == name) return i;
  throw ConfigError("unknown feature '" + std::string(name) + "'");
}

std::size_t edge_window(std::size_t len) {
  const auto k = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(len)));
  return std::min(len, std::max<std::size_t>(2, k));
}

Kinematics kinematics(const ingest::Swipe& swipe) {
  const auto& ev = swipe.events;
  const auto n = static_cast<Eigen::Index>(ev.size());
  if (n < 3) throw DegenerateSwipe("swipe needs at least 3 events for kinematics");

  bool moved = false;
  for (const auto& e : ev)
    if (e.x != ev.front().x || e.y != ev.front().y) moved = true;
  if (!moved) throw DegenerateSwipe("all points of swipe coincide");

  Kinematics k;
  k.vx.resize(n - 1);
  k.vy.resize(n - 1);
  for (Eigen::Index i = 1; i < n; ++i) {
    const auto& a = ev[static_cast<std::size_t>(i - 1)];
    const auto& b = ev[static_cast<std::size_t>(i)];
    const auto dt = static_cast<double>(b.t - a.t);
    if (!(dt > 0)) throw DegenerateSwipe("non-increasing timestamps in swipe");
    k.vx(i - 1) = (b.x - a.x) / dt;
    k.vy(i - 1) = (b.y - a.y) / dt;
  }
  k.ax.resize(n - 2);
  k.ay.resize(n - 2);
  for (Eigen::Index i = 2; i < n; ++i) {
    const auto dt = static_cast<double>(ev[static_cast<std::size_t>(i)].t -
                                        ev[static_cast<std::size_t>(i - 1)].t);
    k.ax(i - 2) = (k.vx(i - 1) - k.vx(i - 2)) / dt;
    k.ay(i - 2) = (k.vy(i - 1) - k.vy(i - 2)) / dt;
  }
  k.speed = (k.vx.array().square() + k.vy.array().square()).sqrt();

  const auto& p0 = ev.front();
  const auto& p1 = ev.back();
  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  k.dev.resize(n);
  if (dx == 0 && dy == 0) {
    k.chord = Chord::degenerate;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& e = ev[static_cast<std::size_t>(i)];
      k.dev(i) = std::hypot(e.x - p0.x, e.y - p0.y);
    }
  } else if (dx == 0) {
    k.chord = Chord::vertical;
    for (Eigen::Index i = 0; i < n; ++i)
      k.dev(i) = std::abs(ev[static_cast<std::size_t>(i)].x - p0.x);
  } else {
    k.chord = Chord::sloped;
    k.slope = dy / dx;
    k.intercept = p0.y - k.slope * p0.x;
    const double norm = std::sqrt(1.0 + k.slope * k.slope);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& e = ev[static_cast<std::size_t>(i)];
      k.dev(i) = std::abs(e.y - k.slope * e.x - k.intercept) / norm;
    }
  }
  return k;
}

namespace {

double head_mean(const Vector& v, std::size_t k) {
  return v.head(static_cast<Eigen::Index>(k)).mean();
}

double tail_mean(const Vector& v, std::size_t k) {
  return v.tail(static_cast<Eigen::Index>(k)).mean();
}

}  // namespace

FeatureVector extract_features(const ingest::Swipe& swipe) {
  const Kinematics k = kinematics(swipe);
  const auto& ev = swipe.events;
  const auto& p0 = ev.front();
  const auto& p1 = ev.back();
  const double n = static_cast<double>(ev.size());

  const double duration = static_cast<double>(p1.t - p0.t);
  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  const double dp = std::hypot(dx, dy);
  double length = 0;
  double area = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i > 0) length += std::hypot(ev[i].x - ev[i - 1].x, ev[i].y - ev[i - 1].y);
    area += std::numbers::pi * ev[i].major * ev[i].minor;
  }
  area /= n;

  // Signed components along the start-end chord ("velocity"/"acceleration"),
  // as opposed to magnitudes ("speed", mean_v, mean_a).
  const double ux = dp > 0 ? dx / dp : 0.0;
  const double uy = dp > 0 ? dy / dp : 0.0;
  const Vector v_along = k.vx * ux + k.vy * uy;
  const Vector a_along = k.ax * ux + k.ay * uy;
  const Vector a_mag = (k.ax.array().square() + k.ay.array().square()).sqrt();

  const std::size_t kv = edge_window(static_cast<std::size_t>(k.vx.size()));
  const std::size_t ka = edge_window(static_cast<std::size_t>(k.ax.size()));

  FeatureVector f;
  f.user = swipe.user;
  f.device = swipe.device;
  f.id = swipe.id;
  auto& x = f.values;
  const double initial_v = head_mean(v_along, kv);
  const double final_v = tail_mean(v_along, kv);
  x << duration, p0.x, p0.y, p1.x, p1.y, dp,
      length, dp / duration, initial_v, final_v, k.speed.mean(), std::atan2(dy, dx),
      area, (final_v - initial_v) / duration, a_mag.mean(), head_mean(a_along, ka),
      tail_mean(a_along, ka), percentile(a_along, 25),
      percentile(a_along, 50), percentile(a_along, 75), percentile(v_along, 25),
      percentile(v_along, 50), percentile(v_along, 75), length / duration,
      head_mean(k.speed, kv), tail_mean(k.speed, kv), percentile(k.speed, 25),
      percentile(k.speed, 50), percentile(k.speed, 75), k.vx.mean(),
      k.vy.mean(), k.ax.mean(), k.ay.mean(), k.dev.mean(), k.dev.maxCoeff(),
      percentile(k.vx, 25), percentile(k.vx, 50), percentile(k.vx, 75),
      percentile(k.vy, 25), percentile(k.vy, 50), percentile(k.vy, 75),
      percentile(k.ax, 25), percentile(k.ax, 50), percentile(k.ax, 75),
      percentile(k.ay, 25), percentile(k.ay, 50), percentile(k.ay, 75);
  return f;
}

FeatureSet extract_all(const ingest::Dataset& ds, ExtractionReport* report) {
  FeatureSet out;
  ExtractionReport rep;
  for (const auto& [user, swipes] : ds.users) {
    auto& rows = out[user];
    for (const auto& s : swipes) {
      try {
        rows.push_back(extract_features(s));
        ++rep.extracted;
      } catch (const DegenerateSwipe&) {
        ++rep.degenerate;
      }
    }
  }
  if (report) *report = rep;
  return out;
}

std::pair<Matrix, Standardizer> standardize(const Matrix& train, const Matrix& apply_to) {
  if (train.rows() == 0) throw InsufficientData("standardize: no training rows");
  Standardizer s = Standardizer::fit(train);
  return {s.transform(apply_to), std::move(s)};
}

Matrix stack(const std::vector<FeatureVector>& rows) {
  Matrix X(static_cast<Eigen::Index>(rows.size()), kNumFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = rows[i].values;
  return X;
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureVector>& rows,
                       std::string_view id_column, const ExtraColumns& extra) {
  out << "user_id,device," << id_column;
  for (auto name : kFeatureNames) out << ',' << name;
  for (const auto& [name, values] : extra) {
    if (values.size() != rows.size())
      throw DimensionMismatch("extra column '" + name + "' has wrong length");
    out << ',' << name;
  }
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r];
    out << f.user << ',' << to_string(f.device) << ',' << f.id;
    for (int j = 0; j < kNumFeatures; ++j) out << ',' << csv::format(f.values(j));
    for (const auto& [_, values] : extra) out << ',' << values[r];
    out << '\n';
  }
}

void write_feature_csv(std::ostream& out, const FeatureSet& set,
                       std::string_view id_column) {
  std::vector<FeatureVector> rows;
  for (const auto& [_, v] : set) rows.insert(rows.end(), v.begin(), v.end());
  write_feature_csv(out, rows, id_column);
}

FeatureSet FeatureFile::by_user() const {
  FeatureSet out;
  for (const auto& f : rows) out[f.user].push_back(f);
  for (auto& [_, v] : out)
    std::stable_sort(v.begin(), v.end(),
                     [](const FeatureVector& a, const FeatureVector& b) { return a.id < b.id; });
  return out;
}

FeatureFile read_feature_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError(1, "missing header");
  const std::size_t fixed = 3 + kNumFeatures;
  if (fields.size() < fixed)
    throw SchemaError(reader.line(), "feature header has too few columns");
  if (fields[0] != "user_id" || fields[1] != "device")
    throw SchemaError(reader.line(), "feature header must start with user_id,device");
  FeatureFile file;
  file.id_column = fields[2];
  for (int j = 0; j < kNumFeatures; ++j)
    if (fields[3 + static_cast<std::size_t>(j)] != kFeatureNames[static_cast<std::size_t>(j)])
      throw SchemaError(reader.line(), "expected feature column '" +
                                           std::string(kFeatureNames[static_cast<std::size_t>(j)]) +
                                           "', found '" + fields[3 + static_cast<std::size_t>(j)] + "'");
  std::vector<std::string> extra_names(fields.begin() + static_cast<std::ptrdiff_t>(fixed),
                                       fields.end());
  for (const auto& name : extra_names) file.extra[name];
  const std::size_t width = fields.size();

  while (reader.next(fields)) {
    const std::size_t line = reader.line();
    if (fields.size() != width)
      throw SchemaError(line, "expected " + std::to_string(width) + " fields, found " +
                                  std::to_string(fields.size()));
    FeatureVector f;
    f.user = fields[0];
    try {
      f.device = parse_device(fields[1]);
    } catch (const ConfigError&) {
      throw ValueError(line, "invalid device '" + fields[1] + "'");
    }
    f.id = static_cast<int>(csv::parse_int(fields[2], line, file.id_column));
    for (int j = 0; j < kNumFeatures; ++j)
      f.values(j) = csv::parse_double(fields[3 + static_cast<std::size_t>(j)], line,
                                      kFeatureNames[static_cast<std::size_t>(j)]);
    for (std::size_t e = 0; e < extra_names.size(); ++e)
      file.extra[extra_names[e]].push_back(fields[fixed + e]);
    file.rows.push_back(std::move(f));
  }
  return file;
}

}  // namespace tcas::features

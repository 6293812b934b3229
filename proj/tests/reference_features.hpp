#pragma once

// Second, deliberately plain implementation of the 47 swipe features used as
// an oracle. Only std::vector and <cmath>; no code shared with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "tcas/ingest.hpp"

namespace tcas::testing {

inline double ref_mean(const std::vector<double>& v, std::size_t from, std::size_t count) {
  double s = 0;
  for (std::size_t i = from; i < from + count; ++i) s += v[i];
  return s / static_cast<double>(count);
}

inline double ref_pct(std::vector<double> v, double m) {
  std::sort(v.begin(), v.end());
  const double pos = (m / 100.0) * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - (pos - static_cast<double>(lo))) + v[lo + 1] * (pos - static_cast<double>(lo));
}

// Entries averaged at each end of a sequence of `len` pairwise values.
inline std::size_t ref_edge(std::size_t len) {
  std::size_t k = (len * 5 + 99) / 100;  // ceil(5% of len)
  if (k < 2) k = 2;
  return std::min(k, len);
}

struct RefKinematics {
  std::vector<double> vx, vy, ax, ay, speed, dev;
};

inline RefKinematics ref_kinematics(const ingest::Swipe& s) {
  RefKinematics k;
  const auto& e = s.events;
  const std::size_t n = e.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = static_cast<double>(e[i].t) - static_cast<double>(e[i - 1].t);
    k.vx.push_back((e[i].x - e[i - 1].x) / dt);
    k.vy.push_back((e[i].y - e[i - 1].y) / dt);
    k.speed.push_back(std::sqrt(k.vx.back() * k.vx.back() + k.vy.back() * k.vy.back()));
  }
  for (std::size_t i = 2; i < n; ++i) {
    const double dt = static_cast<double>(e[i].t) - static_cast<double>(e[i - 1].t);
    k.ax.push_back((k.vx[i - 1] - k.vx[i - 2]) / dt);
    k.ay.push_back((k.vy[i - 1] - k.vy[i - 2]) / dt);
  }
  const double x0 = e.front().x, y0 = e.front().y, x1 = e.back().x, y1 = e.back().y;
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (x0 == x1 && y0 == y1) {
      d = std::sqrt((e[i].x - x0) * (e[i].x - x0) + (e[i].y - y0) * (e[i].y - y0));
    } else if (x0 == x1) {
      d = std::fabs(e[i].x - x0);
    } else {
      const double m = (y1 - y0) / (x1 - x0);
      const double c = y0 - m * x0;
      d = std::fabs(e[i].y - m * e[i].x - c) / std::sqrt(1.0 + m * m);
    }
    k.dev.push_back(d);
  }
  return k;
}

inline std::array<double, 47> ref_features(const ingest::Swipe& s) {
  const auto k = ref_kinematics(s);
  const auto& e = s.events;
  const double x0 = e.front().x, y0 = e.front().y, x1 = e.back().x, y1 = e.back().y;
  const double T = static_cast<double>(e.back().t - e.front().t);
  const double dp = std::sqrt((x1 - x0) * (x1 - x0) + (y1 - y0) * (y1 - y0));
  double l = 0, area = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) l += std::sqrt((e[i].x - e[i - 1].x) * (e[i].x - e[i - 1].x) +
                          (e[i].y - e[i - 1].y) * (e[i].y - e[i - 1].y));
    area += M_PI * e[i].major * e[i].minor;
  }
  area /= static_cast<double>(e.size());

  std::vector<double> va, aa, am;
  for (std::size_t i = 0; i < k.vx.size(); ++i)
    va.push_back(dp > 0 ? (k.vx[i] * (x1 - x0) + k.vy[i] * (y1 - y0)) / dp : 0.0);
  for (std::size_t i = 0; i < k.ax.size(); ++i) {
    aa.push_back(dp > 0 ? (k.ax[i] * (x1 - x0) + k.ay[i] * (y1 - y0)) / dp : 0.0);
    am.push_back(std::sqrt(k.ax[i] * k.ax[i] + k.ay[i] * k.ay[i]));
  }
  const std::size_t nv = k.vx.size(), na = k.ax.size();
  const std::size_t ev = ref_edge(nv), ea = ref_edge(na);
  const double iv = ref_mean(va, 0, ev), fv = ref_mean(va, nv - ev, ev);
  const double max_d = *std::max_element(k.dev.begin(), k.dev.end());

  return {T,
          x0,
          y0,
          x1,
          y1,
          dp,
          l,
          dp / T,
          iv,
          fv,
          ref_mean(k.speed, 0, nv),
          std::atan2(y1 - y0, x1 - x0),
          area,
          (fv - iv) / T,
          ref_mean(am, 0, na),
          ref_mean(aa, 0, ea),
          ref_mean(aa, na - ea, ea),
          ref_pct(aa, 25),
          ref_pct(aa, 50),
          ref_pct(aa, 75),
          ref_pct(va, 25),
          ref_pct(va, 50),
          ref_pct(va, 75),
          l / T,
          ref_mean(k.speed, 0, ev),
          ref_mean(k.speed, nv - ev, ev),
          ref_pct(k.speed, 25),
          ref_pct(k.speed, 50),
          ref_pct(k.speed, 75),
          ref_mean(k.vx, 0, nv),
          ref_mean(k.vy, 0, nv),
          ref_mean(k.ax, 0, na),
          ref_mean(k.ay, 0, na),
          ref_mean(k.dev, 0, k.dev.size()),
          max_d,
          ref_pct(k.vx, 25),
          ref_pct(k.vx, 50),
          ref_pct(k.vx, 75),
          ref_pct(k.vy, 25),
          ref_pct(k.vy, 50),
          ref_pct(k.vy, 75),
          ref_pct(k.ax, 25),
          ref_pct(k.ax, 50),
          ref_pct(k.ax, 75),
          ref_pct(k.ay, 25),
          ref_pct(k.ay, 50),
          ref_pct(k.ay, 75)};
}

/// |a - b| <= tol * max(|a|, |b|), with an absolute floor for values that
/// are zero up to rounding in both implementations.
inline bool rel_close(double a, double b, double tol, double floor = 1e-300) {
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b)) + floor;
}

}  // namespace tcas::testing

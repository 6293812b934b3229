#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tcas/errors.hpp"
#include "tcas/ingest.hpp"
#include "tcas/seeding.hpp"

namespace tcas::ingest {

namespace {

struct Screen {
  double width;
  double height;
};

// Latent per-user swipe style.
struct Style {
  double speed;         // px/ms along the path
  double length;        // mean swipe length, px
  double bow;           // signed curvature as a fraction of length
  double ease;          // speed-profile exponent, larger = sharper mid-swipe peak
  double interval;      // mean sampling interval, ms
  double major;         // fingertip major axis, px
  double minor;         // fingertip minor axis, px
  double p_vertical;    // probability of a vertical swipe
  double p_forward;     // probability of up/left over down/right
  double tilt;          // systematic angular offset from the screen axis, rad
  double cx, cy;        // centre of the start region
};

Style draw_style(Rng& rng, const Screen& screen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  Style s{};
  s.speed = 1.1 * std::exp(0.35 * n(rng));
  s.length = screen.height * (0.15 + 0.25 * u(rng));
  s.bow = 0.12 * n(rng);
  s.ease = 1.3 + 1.7 * u(rng);
  s.interval = 8.0 + 9.0 * u(rng);
  s.major = 18.0 + 30.0 * u(rng);
  s.minor = s.major * (0.55 + 0.35 * u(rng));
  s.p_vertical = 0.5 + 0.45 * u(rng);
  s.p_forward = 0.2 + 0.6 * u(rng);
  s.tilt = 0.15 * n(rng);
  s.cx = screen.width * (0.3 + 0.4 * u(rng));
  s.cy = screen.height * (0.35 + 0.4 * u(rng));
  return s;
}

Swipe draw_swipe(Rng& rng, const Style& st, const Screen& screen,
                 std::int64_t t0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const double pi = std::numbers::pi;

  const bool vertical = u(rng) < st.p_vertical;
  const bool forward = u(rng) < st.p_forward;
  double angle = vertical ? (forward ? -pi / 2 : pi / 2) : (forward ? pi : 0.0);
  angle += st.tilt + 0.05 * n(rng);

  const double length = st.length * std::exp(0.2 * n(rng));
  const double speed = st.speed * std::exp(0.15 * n(rng));
  const double bow = st.bow + 0.04 * n(rng);
  const double interval = st.interval * (1.0 + 0.05 * n(rng));

  const double target_ms = length / speed;
  const auto n_events = static_cast<std::size_t>(
      std::clamp(std::lround(target_ms / interval) + 1L, 6L, 60L));

  const double x0 = std::clamp(st.cx + 60.0 * n(rng), 0.0, screen.width);
  const double y0 = std::clamp(st.cy + 60.0 * n(rng), 0.0, screen.height);
  const double x1 = x0 + length * std::cos(angle);
  const double y1 = y0 + length * std::sin(angle);
  const double mx = 0.5 * (x0 + x1) - bow * length * std::sin(angle);
  const double my = 0.5 * (y0 + y1) + bow * length * std::cos(angle);

  std::vector<std::int64_t> times(n_events);
  times[0] = t0;
  for (std::size_t i = 1; i < n_events; ++i) {
    auto step = std::lround(interval * (1.0 + 0.1 * n(rng)));
    times[i] = times[i - 1] + std::max<std::int64_t>(1, step);
  }
  const double span = static_cast<double>(times.back() - times.front());

  Swipe sw;
  sw.events.reserve(n_events);
  for (std::size_t i = 0; i < n_events; ++i) {
    const double tau = static_cast<double>(times[i] - t0) / span;
    const double a = std::pow(tau, st.ease);
    const double b = std::pow(1.0 - tau, st.ease);
    const double s = a / (a + b);
    const double w0 = (1 - s) * (1 - s), w1 = 2 * s * (1 - s), w2 = s * s;
    TouchEvent e;
    e.t = times[i];
    e.x = w0 * x0 + w1 * mx + w2 * x1 + 0.8 * n(rng);
    e.y = w0 * y0 + w1 * my + w2 * y1 + 0.8 * n(rng);
    e.major = std::max(0.5, st.major * (1.0 + 0.08 * n(rng)));
    e.minor = std::max(0.5, st.minor * (1.0 + 0.08 * n(rng)));
    e.action = i == 0 ? Action::down
                      : (i + 1 == n_events ? Action::up : Action::move);
    sw.events.push_back(e);
  }
  return sw;
}

}  // namespace

Dataset synth_dataset(const SynthConfig& cfg) {
  if (cfg.n_users < 2)
    throw ConfigError("synth: n_users must be >= 2 (impostor sampling needs another user)");
  if (cfg.swipes_per_user < 20)
    throw ConfigError("synth: swipes_per_user must be >= 20");

  const Screen screen = cfg.device == Device::phone ? Screen{1080, 1920}
                                                    : Screen{1600, 2560};
  const int width = std::max(2, static_cast<int>(std::to_string(cfg.n_users).size()));

  Rng master(derive_seed(cfg.seed, "synth/styles"));
  std::vector<Swipe> swipes;
  swipes.reserve(cfg.n_users * cfg.swipes_per_user);
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    char name[32];
    std::snprintf(name, sizeof name, "u%0*zu", width, u + 1);
    const Style style = draw_style(master, screen);
    Rng rng(derive_seed(cfg.seed, "synth/swipes", name));
    std::uniform_int_distribution<int> gap(400, 2500);

    const std::size_t first_session = cfg.swipes_per_user / 2;
    std::int64_t t = 1'000'000;
    for (std::size_t k = 0; k < cfg.swipes_per_user; ++k) {
      if (k == first_session) t += 86'400'000;
      Swipe sw = draw_swipe(rng, style, screen, t);
      sw.user = name;
      sw.device = cfg.device;
      sw.session = k < first_session ? "s1" : "s2";
      t = sw.t_end() + gap(rng);
      swipes.push_back(std::move(sw));
    }
  }
  char id[64];
  std::snprintf(id, sizeof id, "synth-%s-seed%llu",
                std::string(to_string(cfg.device)).c_str(),
                static_cast<unsigned long long>(cfg.seed));
  return assemble_dataset(std::move(swipes), cfg.device, id);
}

}  // namespace tcas::ingest

#include <numeric>

#include "tcas/eval.hpp"

namespace tcas::eval {

std::string_view to_string(Ordering o) {
  return o == Ordering::chronological ? "chronological" : "seeded_random";
}

Ordering parse_ordering(std::string_view s) {
  if (s == "chronological") return Ordering::chronological;
  if (s == "seeded_random") return Ordering::seeded_random;
  throw ConfigError("split.ordering must be chronological or seeded_random, got '" +
                    std::string(s) + "'");
}

void SplitConfig::validate() const {
  if (!(train_fraction > 0 && train_fraction < 1))
    throw ConfigError("split.train_fraction must be in (0, 1)");
  if (min_items < 2) throw ConfigError("split.min_swipes must be >= 2");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, const SplitConfig& cfg, std::string_view key) {
  const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (cfg.ordering == Ordering::seeded_random) {
    Rng rng(derive_seed(cfg.seed, "split", key));
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  std::vector<std::size_t> tr(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> te(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  return {tr, te};
}

}  // namespace tcas::eval

#pragma once

#include <string>
#include <vector>

#include "tcas/features.hpp"

namespace tcas::windowing {

struct WindowConfig {
  std::size_t p = 5;  // swipes per window
  std::size_t q = 1;  // swipes dropped/added per slide

  void validate() const;  // throws ConfigError
};

struct WindowSample {
  std::string user;
  Device device = Device::phone;
  int window_id = -1;
  FeatureRow vector = FeatureRow::Zero();  // per-feature mean of the members
  std::vector<int> members;                // swipe ids

  features::FeatureVector as_feature_vector() const;
};

/// Sliding windows over one user's time-ordered swipe vectors. Yields
/// floor((N - p)/q) + 1 windows for N >= p and none otherwise.
std::vector<WindowSample> windows(const std::vector<features::FeatureVector>& user_vectors,
                                  const WindowConfig& cfg);

using WindowSet = std::map<std::string, std::vector<WindowSample>>;

/// Users with fewer than p swipes get no windows; a warning is appended.
WindowSet windows(const features::FeatureSet& set, const WindowConfig& cfg,
                  std::vector<std::string>* warnings = nullptr);

/// Window samples re-read from a feature CSV carry no member list.
WindowSet from_feature_set(const features::FeatureSet& set);

std::vector<features::FeatureVector> flatten(const WindowSet& set);

Matrix stack(const std::vector<WindowSample>& rows);

}  // namespace tcas::windowing

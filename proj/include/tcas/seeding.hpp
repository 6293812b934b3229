#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tcas {

using Rng = std::mt19937_64;

/// Stable sub-seed for (master, stage, key). Independent of evaluation order,
/// so per-user work can run in any order or in parallel.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::string_view key = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace tcas

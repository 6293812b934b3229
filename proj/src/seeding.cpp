#include "tcas/seeding.hpp"

namespace tcas {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::string_view key) {
  std::uint64_t h = splitmix64(master);
  h = fnv1a(stage, h);
  h = fnv1a(std::string_view("\x1f", 1), h);
  h = fnv1a(key, h);
  return splitmix64(h);
}

}  // namespace tcas

#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "tcas/errors.hpp"

namespace tcas::cli {

std::string sha256_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

void Manifest::input(const std::filesystem::path& p) { inputs_.push_back(p); }
void Manifest::output(const std::filesystem::path& p) { outputs_.push_back(p); }

void Manifest::write(const std::filesystem::path& dir) const {
  auto files = [](const std::vector<std::filesystem::path>& ps) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : ps) a.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
    return a;
  };
  const nlohmann::json j = {{"command", command_},
                            {"config", config_},
                            {"inputs", files(inputs_)},
                            {"outputs", files(outputs_)}};
  const auto path = dir / ("manifest_" + command_ + ".json");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace tcas::cli

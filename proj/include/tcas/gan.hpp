#pragma once

// Unconditional tabular GANs over window feature vectors. One GAN learns the
// genuine user's windows (legitimate), another the impostor windows
// (adversarial); their samples augment both classes of the training set.

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tcas/features.hpp"
#include "tcas/nn.hpp"

namespace tcas::gan {

struct GanConfig {
  int noise_dim = 32;
  std::vector<int> generator_widths = {64, 64};
  std::vector<int> discriminator_widths = {64, 32};
  int epochs = 300;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.5;
  std::uint64_t seed = 0;
  std::size_t n_samples = 250;
  double band_low = 0.40;   // held-out discriminator accuracy band
  double band_high = 0.60;
  int patience = 5;         // consecutive in-band epochs before stopping
  int min_epochs = 50;      // no early stop before this many epochs
  double holdout = 0.2;     // real rows kept out for the accuracy probe

  void validate() const;  // throws ConfigError
};

nlohmann::json to_json(const GanConfig& c);
GanConfig gan_config_from_json(const nlohmann::json& j, GanConfig base = {});

/// Per-epoch averages over the training batches: E1 = mean log D(x),
/// E2 = mean log(1 - D(G(z))), value = E1 + E2, plus the held-out
/// discriminator accuracy on real vs generated rows.
struct Curves {
  std::vector<double> e1, e2, value, accuracy;
  int epochs_run = 0;
  bool early_stop = false;
};

struct Gan {
  nn::Network generator;
  nn::Network discriminator;
  features::Standardizer scaler;  // fitted on the real training rows
  int noise_dim = 0;
  Curves curves;
};

/// Standardizes X_real internally. Throws InsufficientData when there are
/// fewer than 2 * batch_size rows and DivergenceError on non-finite losses.
Gan train_gan(const Matrix& X_real, const GanConfig& cfg);

/// n de-standardized generator samples.
Matrix sample(const Gan& g, std::size_t n, std::uint64_t seed);

/// -(E1 + E2) for one real batch and one fake batch, and its gradient with
/// respect to the discriminator parameters.
std::pair<double, Vector> discriminator_loss_and_gradient(const nn::Network& d,
                                                          const Matrix& real,
                                                          const Matrix& fake);

/// Non-saturating generator loss -mean log D(G(z)) and its gradient with
/// respect to the generator parameters.
std::pair<double, Vector> generator_loss_and_gradient(const nn::Network& g,
                                                      const nn::Network& d,
                                                      const Matrix& noise);

nn::Network make_generator(int noise_dim, const std::vector<int>& widths, int out, Rng& rng);
nn::Network make_discriminator(int in, const std::vector<int>& widths, Rng& rng);

struct GanPair {
  Gan legitimate;
  Gan adversarial;
};

struct Augmented {
  Matrix X;           // genuine rows first
  Eigen::VectorXi y;  // 1 = genuine
};

/// genuine + n legitimate samples against impostor + n adversarial samples.
/// Inputs must already be balanced (ImbalanceError otherwise).
Augmented augment_training_set(const Matrix& genuine, const Matrix& impostor,
                               const GanPair& pair, std::size_t n, std::uint64_t seed);

/// Random-forest utility probe: balanced accuracy on a held-out fifth of the
/// real rows for a verifier trained on real rows alone and on real rows plus
/// GAN samples. Passes when the augmented score keeps >= 93% of the real one.
struct UtilityCheck {
  double real_only = 0;
  double augmented = 0;
  double ratio = 0;
  bool passed = false;
};

UtilityCheck utility_check(const Matrix& genuine, const Matrix& impostor, const GanPair& pair,
                           std::size_t n, std::uint64_t seed);

inline constexpr int kGanSchemaVersion = 1;

nlohmann::json to_json(const Gan& g);
Gan gan_from_json(const nlohmann::json& j);
void save_gan(const Gan& g, const std::filesystem::path& path);
Gan load_gan(const std::filesystem::path& path);

/// `<user>_<legit|adv>.gan.json`
std::string gan_filename(std::string_view user, std::string_view role);

}  // namespace tcas::gan

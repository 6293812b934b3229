#include <gtest/gtest.h>

#include <filesystem>

#include "gradcheck.hpp"
#include "support.hpp"
#include "tcas/errors.hpp"
#include "tcas/gan.hpp"

using namespace tcas;
using namespace tcas::gan;

namespace {

GanConfig quick(std::uint64_t seed) {
  GanConfig c;
  c.epochs = 60;
  c.min_epochs = 10;
  c.seed = seed;
  return c;
}

GanPair trained_pair() {
  const Matrix g = tcas::testing::random_matrix(80, kNumFeatures, 1).array() + 1.0;
  const Matrix i = tcas::testing::random_matrix(80, kNumFeatures, 2);
  return {train_gan(g, quick(3)), train_gan(i, quick(4))};
}

}  // namespace

TEST(GanGradients, DiscriminatorMatchesCentralDifferences) {
  Rng rng(1);
  const auto d = make_discriminator(7, {9, 5}, rng);
  const Matrix real = tcas::testing::random_matrix(6, 7, 2), fake = tcas::testing::random_matrix(6, 7, 3);
  const auto [loss, grad] = discriminator_loss_and_gradient(d, real, fake);
  auto f = [&](const Vector& t) {
    auto n = d;
    n.set_parameters(t);
    return discriminator_loss_and_gradient(n, real, fake).first;
  };
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_LT(tcas::testing::max_gradient_error(f, d.parameters(), grad, 10, 4), 1e-4);
  EXPECT_LT(tcas::testing::max_gradient_error(f, d.parameters(), grad, 200, 5), 1e-4);
}

TEST(GanGradients, GeneratorMatchesCentralDifferences) {
  Rng rng(2);
  const auto g = make_generator(4, {8, 8}, 7, rng);
  const auto d = make_discriminator(7, {9, 5}, rng);
  const Matrix noise = tcas::testing::random_matrix(6, 4, 6);
  const auto [loss, grad] = generator_loss_and_gradient(g, d, noise);
  auto f = [&](const Vector& t) {
    auto n = g;
    n.set_parameters(t);
    return generator_loss_and_gradient(n, d, noise).first;
  };
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_LT(tcas::testing::max_gradient_error(f, g.parameters(), grad, 10, 7), 1e-4);
  EXPECT_LT(tcas::testing::max_gradient_error(f, g.parameters(), grad, 200, 8), 1e-4);
}

TEST(GanLoss, IndifferentDiscriminatorGivesTwoLogHalf) {
  Rng rng(3);
  auto d = make_discriminator(5, {4}, rng);
  d.layers().back().W.setZero();
  d.layers().back().b.setZero();
  const auto [loss, grad] =
      discriminator_loss_and_gradient(d, tcas::testing::random_matrix(8, 5, 1), tcas::testing::random_matrix(8, 5, 2));
  EXPECT_NEAR(-loss, 2 * std::log(0.5), 1e-15);
}

TEST(GanShapes, ArchitectureMatchesConfiguration) {
  Rng rng(4);
  const auto g = make_generator(32, {64, 64}, 47, rng);
  const auto d = make_discriminator(47, {64, 32}, rng);
  EXPECT_EQ(g.input_dim(), 32);
  EXPECT_EQ(g.output_dim(), 47);
  EXPECT_EQ(g.layers().size(), 3u);
  EXPECT_EQ(d.input_dim(), 47);
  EXPECT_EQ(d.output_dim(), 1);
  EXPECT_EQ(d.layers()[1].W.rows(), 32);
}

TEST(TrainGan, LearnsAConstantTarget) {
  const Matrix X = Matrix::Constant(96, kNumFeatures, 2.5);
  auto cfg = quick(1);
  cfg.epochs = cfg.min_epochs = 300;
  const Gan g = train_gan(X, cfg);
  const Matrix s = sample(g, 200, 2);
  EXPECT_LT((s.colwise().mean().array() - 2.5).abs().maxCoeff(), 0.1);
}

TEST(GanLoss, OptimisedDiscriminatorBeatsChanceOnPointTarget) {
  Rng rng(5);
  const auto g = make_generator(8, {16}, 6, rng);
  auto d = make_discriminator(6, {16, 8}, rng);
  const Matrix real = Matrix::Constant(64, 6, 0.3);
  const Matrix fake = g.forward(tcas::testing::random_matrix(64, 8, 9));
  Vector theta = d.parameters();
  for (int step = 0; step < 500; ++step) {
    d.set_parameters(theta);
    theta -= 0.05 * discriminator_loss_and_gradient(d, real, fake).second;
  }
  d.set_parameters(theta);
  const double hits = static_cast<double>((d.forward(real).array() >= 0).count() +
                                          (d.forward(fake).array() < 0).count());
  EXPECT_GE(hits / 128.0, 0.5);
}

TEST(TrainGan, RecordsCurvesPerEpoch) {
  const Gan g = train_gan(tcas::testing::random_matrix(96, kNumFeatures, 5), quick(2));
  EXPECT_GT(g.curves.epochs_run, 0);
  EXPECT_LE(g.curves.epochs_run, 60);
  EXPECT_EQ(g.curves.value.size(), static_cast<std::size_t>(g.curves.epochs_run));
  for (std::size_t e = 0; e < g.curves.value.size(); ++e) {
    EXPECT_NEAR(g.curves.value[e], g.curves.e1[e] + g.curves.e2[e], 1e-12);
    EXPECT_LE(g.curves.e1[e], 0.0);
    EXPECT_LE(g.curves.e2[e], 0.0);
    EXPECT_GE(g.curves.accuracy[e], 0.0);
    EXPECT_LE(g.curves.accuracy[e], 1.0);
  }
  if (g.curves.early_stop) EXPECT_GE(g.curves.epochs_run, 10);
}

TEST(TrainGan, DeterministicForSeed) {
  const Matrix X = tcas::testing::random_matrix(70, kNumFeatures, 6);
  const Gan a = train_gan(X, quick(9)), b = train_gan(X, quick(9));
  EXPECT_EQ(sample(a, 30, 1), sample(b, 30, 1));
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(TrainGan, TooFewRowsIsInsufficientData) {
  EXPECT_THROW(train_gan(tcas::testing::random_matrix(63, kNumFeatures, 1), quick(1)), InsufficientData);
}

TEST(Sample, Shapes) {
  const Gan g = train_gan(tcas::testing::random_matrix(64, kNumFeatures, 7), quick(3));
  EXPECT_EQ(sample(g, 250, 1).rows(), 250);
  EXPECT_EQ(sample(g, 250, 1).cols(), kNumFeatures);
  EXPECT_EQ(sample(g, 1, 1).rows(), 1);
  EXPECT_TRUE(sample(g, 250, 1).allFinite());
}

TEST(Augment, AddsNToEachClass) {
  const auto pair = trained_pair();
  const Matrix g = tcas::testing::random_matrix(464, kNumFeatures, 8);
  const Matrix i = tcas::testing::random_matrix(464, kNumFeatures, 9);
  const auto aug = augment_training_set(g, i, pair, 250, 1);
  EXPECT_EQ(aug.X.rows(), 2 * 714);
  EXPECT_EQ(aug.y.sum(), 714);
  EXPECT_EQ(Matrix(aug.X.topRows(464)), g);
  EXPECT_EQ(Matrix(aug.X.middleRows(714, 464)), i);
}

TEST(Augment, ZeroSamplesIsIdentity) {
  const auto pair = trained_pair();
  const Matrix g = tcas::testing::random_matrix(20, kNumFeatures, 8);
  const Matrix i = tcas::testing::random_matrix(20, kNumFeatures, 9);
  const auto aug = augment_training_set(g, i, pair, 0, 1);
  Matrix both(40, kNumFeatures);
  both << g, i;
  EXPECT_EQ(aug.X, both);
}

TEST(Augment, UnequalClassesAreImbalanceError) {
  const auto pair = trained_pair();
  EXPECT_THROW(augment_training_set(tcas::testing::random_matrix(20, kNumFeatures, 1),
                                    tcas::testing::random_matrix(21, kNumFeatures, 2), pair, 5, 1),
               ImbalanceError);
}

TEST(GanFile, SaveLoadReproducesSamples) {
  const Gan g = train_gan(tcas::testing::random_matrix(64, kNumFeatures, 10), quick(5));
  const auto path = std::filesystem::temp_directory_path() / gan_filename("u9", "legit");
  save_gan(g, path);
  const Gan back = load_gan(path);
  EXPECT_EQ(sample(back, 20, 3), sample(g, 20, 3));
  EXPECT_EQ(back.curves.epochs_run, g.curves.epochs_run);
}

TEST(GanConfig, RejectsBadValues) {
  GanConfig c;
  c.band_low = 0.7;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(gan_config_from_json({{"quality_band", {0.4}}}), ConfigError);
  const auto round = gan_config_from_json(to_json(GanConfig{}));
  EXPECT_EQ(to_json(round), to_json(GanConfig{}));
}

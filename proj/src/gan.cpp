#include "tcas/gan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tcas/classifier.hpp"
#include "tcas/errors.hpp"
#include "tcas/seeding.hpp"
#include "tcas/tuning.hpp"

namespace tcas::gan {

using nlohmann::json;

void GanConfig::validate() const {
  auto positive = [](const std::vector<int>& w) {
    return std::all_of(w.begin(), w.end(), [](int v) { return v > 0; });
  };
  if (noise_dim < 1) throw ConfigError("gan.noise_dim must be >= 1");
  if (generator_widths.empty() || !positive(generator_widths))
    throw ConfigError("gan.generator_widths must be non-empty and positive");
  if (discriminator_widths.empty() || !positive(discriminator_widths))
    throw ConfigError("gan.discriminator_widths must be non-empty and positive");
  if (epochs < 1) throw ConfigError("gan.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("gan.batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("gan.learning_rate must be > 0");
  if (!(beta1 >= 0 && beta1 < 1)) throw ConfigError("gan.beta1 must be in [0, 1)");
  if (!(band_low >= 0 && band_low <= band_high && band_high <= 1))
    throw ConfigError("gan.quality_band must satisfy 0 <= low <= high <= 1");
  if (patience < 1) throw ConfigError("gan.patience must be >= 1");
  if (!(holdout > 0 && holdout < 1)) throw ConfigError("gan.holdout must be in (0, 1)");
}

json to_json(const GanConfig& c) {
  return {{"noise_dim", c.noise_dim},
          {"generator_widths", c.generator_widths},
          {"discriminator_widths", c.discriminator_widths},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"seed", c.seed},
          {"n_samples", c.n_samples},
          {"quality_band", {c.band_low, c.band_high}},
          {"patience", c.patience},
          {"min_epochs", c.min_epochs},
          {"holdout", c.holdout}};
}

GanConfig gan_config_from_json(const json& j, GanConfig c) {
  try {
    c.noise_dim = j.value("noise_dim", c.noise_dim);
    c.generator_widths = j.value("generator_widths", c.generator_widths);
    c.discriminator_widths = j.value("discriminator_widths", c.discriminator_widths);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.beta1 = j.value("beta1", c.beta1);
    c.seed = j.value("seed", c.seed);
    c.n_samples = j.value("n_samples", c.n_samples);
    if (j.contains("quality_band")) {
      const auto band = j.at("quality_band").get<std::vector<double>>();
      if (band.size() != 2) throw ConfigError("gan.quality_band must have two entries");
      c.band_low = band[0];
      c.band_high = band[1];
    }
    c.patience = j.value("patience", c.patience);
    c.min_epochs = j.value("min_epochs", c.min_epochs);
    c.holdout = j.value("holdout", c.holdout);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("gan config: ") + e.what());
  }
  c.validate();
  return c;
}

nn::Network make_generator(int noise_dim, const std::vector<int>& widths, int out, Rng& rng) {
  std::vector<int> w = {noise_dim};
  w.insert(w.end(), widths.begin(), widths.end());
  w.push_back(out);
  std::vector<nn::Activation> acts(widths.size(), nn::Activation::leaky_relu);
  acts.push_back(nn::Activation::identity);
  return nn::Network(w, acts, rng);
}

nn::Network make_discriminator(int in, const std::vector<int>& widths, Rng& rng) {
  std::vector<int> w = {in};
  w.insert(w.end(), widths.begin(), widths.end());
  w.push_back(1);
  std::vector<nn::Activation> acts(widths.size(), nn::Activation::leaky_relu);
  acts.push_back(nn::Activation::identity);
  return nn::Network(w, acts, rng);
}

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = z(rng);
  return out;
}

struct DiscriminatorStep {
  double e1 = 0, e2 = 0;  // batch means of log D(x) and log(1 - D(G(z)))
};

// Accumulates the gradient of -(E1 + E2) into `grads`.
DiscriminatorStep discriminator_pass(const nn::Network& d, const Matrix& real, const Matrix& fake,
                                     nn::Gradients& grads) {
  DiscriminatorStep s;
  nn::Network::Cache cache;
  const Matrix lr = d.forward(real, cache);
  Matrix dr(real.rows(), 1);
  const auto nr = static_cast<double>(real.rows());
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    s.e1 -= nn::softplus(-lr(i, 0)) / nr;
    dr(i, 0) = (nn::sigmoid(lr(i, 0)) - 1.0) / nr;
  }
  d.backward(cache, dr, &grads);

  const Matrix lf = d.forward(fake, cache);
  Matrix df(fake.rows(), 1);
  const auto nf = static_cast<double>(fake.rows());
  for (Eigen::Index i = 0; i < fake.rows(); ++i) {
    s.e2 -= nn::softplus(lf(i, 0)) / nf;
    df(i, 0) = nn::sigmoid(lf(i, 0)) / nf;
  }
  d.backward(cache, df, &grads);
  return s;
}

double generator_pass(const nn::Network& g, const nn::Network& d, const Matrix& noise,
                      nn::Gradients& grads) {
  nn::Network::Cache gc, dc;
  const Matrix fake = g.forward(noise, gc);
  const Matrix logits = d.forward(fake, dc);
  const auto n = static_cast<double>(noise.rows());
  double loss = 0;
  Matrix dl(noise.rows(), 1);
  for (Eigen::Index i = 0; i < noise.rows(); ++i) {
    loss += nn::softplus(-logits(i, 0)) / n;
    dl(i, 0) = (nn::sigmoid(logits(i, 0)) - 1.0) / n;
  }
  const Matrix dfake = d.backward(dc, dl, nullptr);
  g.backward(gc, dfake, &grads);
  return loss;
}

double holdout_accuracy(const nn::Network& d, const Matrix& real, const Matrix& fake) {
  const Matrix lr = d.forward(real), lf = d.forward(fake);
  const double hits = static_cast<double>((lr.array() >= 0).count() + (lf.array() < 0).count());
  return hits / static_cast<double>(real.rows() + fake.rows());
}

}  // namespace

std::pair<double, Vector> discriminator_loss_and_gradient(const nn::Network& d, const Matrix& real,
                                                          const Matrix& fake) {
  auto grads = d.zero_gradients();
  const auto s = discriminator_pass(d, real, fake, grads);
  return {-(s.e1 + s.e2), grads.flatten()};
}

std::pair<double, Vector> generator_loss_and_gradient(const nn::Network& g, const nn::Network& d,
                                                      const Matrix& noise) {
  auto grads = g.zero_gradients();
  const double loss = generator_pass(g, d, noise, grads);
  return {loss, grads.flatten()};
}

Gan train_gan(const Matrix& X_real, const GanConfig& cfg) {
  cfg.validate();
  if (X_real.rows() < 2 * cfg.batch_size)
    throw InsufficientData("gan: need at least " + std::to_string(2 * cfg.batch_size) +
                           " real rows, have " + std::to_string(X_real.rows()));
  if (!X_real.allFinite()) throw DataError("gan: non-finite training rows");

  Gan gan;
  gan.noise_dim = cfg.noise_dim;
  gan.scaler = features::Standardizer::fit(X_real);
  // Constant columns are centred with unit scale so the generator targets 0.
  for (std::size_t j = 0; j < gan.scaler.constant.size(); ++j)
    if (gan.scaler.constant[j]) {
      gan.scaler.constant[j] = false;
      gan.scaler.stddev(static_cast<Eigen::Index>(j)) = 1.0;
    }
  const Matrix Z = gan.scaler.transform(X_real);

  Rng init(derive_seed(cfg.seed, "gan/init"));
  gan.generator = make_generator(cfg.noise_dim, cfg.generator_widths,
                                 static_cast<int>(Z.cols()), init);
  gan.discriminator = make_discriminator(static_cast<int>(Z.cols()), cfg.discriminator_widths, init);

  // Held-out real rows and a fixed noise block for the accuracy probe.
  Rng rng(derive_seed(cfg.seed, "gan/train"));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(Z.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_hold = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.holdout * static_cast<double>(order.size()))));
  Matrix hold(static_cast<Eigen::Index>(n_hold), Z.cols());
  for (std::size_t i = 0; i < n_hold; ++i) hold.row(static_cast<Eigen::Index>(i)) = Z.row(order[i]);
  std::vector<Eigen::Index> train(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());
  Rng probe_rng(derive_seed(cfg.seed, "gan/probe"));
  const Matrix probe_noise = gaussian(hold.rows(), cfg.noise_dim, probe_rng);

  nn::Adam d_opt(gan.discriminator, cfg.learning_rate, cfg.beta1);
  nn::Adam g_opt(gan.generator, cfg.learning_rate, cfg.beta1);
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  int in_band = 0;
  Matrix real;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    double e1 = 0, e2 = 0;
    int batches = 0;
    for (std::size_t start = 0; start < train.size(); start += bs) {
      const std::size_t end = std::min(train.size(), start + bs);
      const auto m = static_cast<Eigen::Index>(end - start);
      real.resize(m, Z.cols());
      for (Eigen::Index r = 0; r < m; ++r) real.row(r) = Z.row(train[start + static_cast<std::size_t>(r)]);

      const Matrix fake = gan.generator.forward(gaussian(m, cfg.noise_dim, rng));
      auto dg = gan.discriminator.zero_gradients();
      const auto s = discriminator_pass(gan.discriminator, real, fake, dg);
      d_opt.step(gan.discriminator, dg);

      auto gg = gan.generator.zero_gradients();
      const double gl = generator_pass(gan.generator, gan.discriminator,
                                       gaussian(m, cfg.noise_dim, rng), gg);
      if (!std::isfinite(s.e1) || !std::isfinite(s.e2) || !std::isfinite(gl))
        throw DivergenceError("gan: non-finite loss at epoch " + std::to_string(epoch + 1));
      g_opt.step(gan.generator, gg);
      e1 += s.e1;
      e2 += s.e2;
      ++batches;
    }
    auto& c = gan.curves;
    c.e1.push_back(e1 / batches);
    c.e2.push_back(e2 / batches);
    c.value.push_back(c.e1.back() + c.e2.back());
    const double acc =
        holdout_accuracy(gan.discriminator, hold, gan.generator.forward(probe_noise));
    c.accuracy.push_back(acc);
    c.epochs_run = epoch + 1;
    in_band = (acc >= cfg.band_low && acc <= cfg.band_high) ? in_band + 1 : 0;
    if (epoch + 1 >= cfg.min_epochs && in_band >= cfg.patience) {
      c.early_stop = true;
      break;
    }
  }
  return gan;
}

Matrix sample(const Gan& g, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix noise = gaussian(static_cast<Eigen::Index>(n), g.noise_dim, rng);
  return g.scaler.inverse(g.generator.forward(noise));
}

Augmented augment_training_set(const Matrix& genuine, const Matrix& impostor, const GanPair& pair,
                               std::size_t n, std::uint64_t seed) {
  if (genuine.rows() != impostor.rows())
    throw ImbalanceError("augment: real classes must be balanced (" +
                         std::to_string(genuine.rows()) + " genuine vs " +
                         std::to_string(impostor.rows()) + " impostor)");
  if (genuine.cols() != impostor.cols())
    throw DimensionMismatch("augment: genuine and impostor widths differ");
  const auto k = static_cast<Eigen::Index>(n);
  const Eigen::Index half = genuine.rows() + k;
  Augmented a;
  a.X.resize(2 * half, genuine.cols());
  a.y.resize(2 * half);
  a.X.topRows(genuine.rows()) = genuine;
  if (k > 0) a.X.middleRows(genuine.rows(), k) = sample(pair.legitimate, n, derive_seed(seed, "gan/sample", "legit"));
  a.X.middleRows(half, impostor.rows()) = impostor;
  if (k > 0) a.X.bottomRows(k) = sample(pair.adversarial, n, derive_seed(seed, "gan/sample", "adv"));
  a.y.head(half).setOnes();
  a.y.tail(half).setZero();
  return a;
}

UtilityCheck utility_check(const Matrix& genuine, const Matrix& impostor, const GanPair& pair,
                           std::size_t n, std::uint64_t seed) {
  Matrix X(genuine.rows() + impostor.rows(), genuine.cols());
  X << genuine, impostor;
  Eigen::VectorXi y(X.rows());
  y.head(genuine.rows()).setOnes();
  y.tail(impostor.rows()).setZero();
  const auto fold = learners::stratified_folds(y, 5, derive_seed(seed, "gan/utility"));

  std::vector<Eigen::Index> tr_g, tr_i, te;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (fold[static_cast<std::size_t>(i)] == 0) te.push_back(i);
    else (y(i) == 1 ? tr_g : tr_i).push_back(i);
  }
  auto rows = [&](const std::vector<Eigen::Index>& idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(idx[r]);
    return out;
  };
  const Matrix G = rows(tr_g), I = rows(tr_i), T = rows(te);
  Eigen::VectorXi yt(T.rows());
  for (std::size_t r = 0; r < te.size(); ++r) yt(static_cast<Eigen::Index>(r)) = y(te[r]);

  auto score = [&](const Matrix& Xtr, const Eigen::VectorXi& ytr) {
    const auto m = learners::train(learners::Algorithm::random_forest, Xtr, ytr, json::object(),
                                   derive_seed(seed, "gan/utility/rf"));
    Eigen::VectorXi pred(T.rows());
    for (Eigen::Index i = 0; i < T.rows(); ++i) pred(i) = learners::predict_label(m, T.row(i));
    return learners::balanced_accuracy(yt, pred);
  };

  Matrix Xr(G.rows() + I.rows(), X.cols());
  Xr << G, I;
  Eigen::VectorXi yr(Xr.rows());
  yr.head(G.rows()).setOnes();
  yr.tail(I.rows()).setZero();

  const auto k = static_cast<Eigen::Index>(n);
  Matrix Xa(Xr.rows() + 2 * k, X.cols());
  Xa << G, sample(pair.legitimate, n, derive_seed(seed, "gan/utility", "legit")), I,
      sample(pair.adversarial, n, derive_seed(seed, "gan/utility", "adv"));
  Eigen::VectorXi ya(Xa.rows());
  ya.head(G.rows() + k).setOnes();
  ya.tail(I.rows() + k).setZero();

  UtilityCheck u;
  u.real_only = score(Xr, yr);
  u.augmented = score(Xa, ya);
  u.ratio = u.real_only > 0 ? u.augmented / u.real_only : 0.0;
  u.passed = u.ratio >= 0.93;
  return u;
}

json to_json(const Gan& g) {
  return {{"schema_version", kGanSchemaVersion},
          {"noise_dim", g.noise_dim},
          {"generator", nn::to_json(g.generator)},
          {"discriminator", nn::to_json(g.discriminator)},
          {"scaler", learners::to_json(g.scaler)},
          {"curves",
           {{"e1", g.curves.e1},
            {"e2", g.curves.e2},
            {"value", g.curves.value},
            {"accuracy", g.curves.accuracy},
            {"epochs_run", g.curves.epochs_run},
            {"early_stop", g.curves.early_stop}}}};
}

Gan gan_from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw CorruptModel("gan checkpoint has no schema_version");
  if (j.at("schema_version") != kGanSchemaVersion)
    throw SchemaVersionError("unsupported gan schema_version " + j.at("schema_version").dump());
  Gan g;
  try {
    g.noise_dim = j.at("noise_dim").get<int>();
    g.generator = nn::network_from_json(j.at("generator"));
    g.discriminator = nn::network_from_json(j.at("discriminator"));
    g.scaler = learners::standardizer_from_json(j.at("scaler"));
    const auto& c = j.at("curves");
    g.curves.e1 = c.at("e1").get<std::vector<double>>();
    g.curves.e2 = c.at("e2").get<std::vector<double>>();
    g.curves.value = c.at("value").get<std::vector<double>>();
    g.curves.accuracy = c.at("accuracy").get<std::vector<double>>();
    g.curves.epochs_run = c.at("epochs_run").get<int>();
    g.curves.early_stop = c.at("early_stop").get<bool>();
  } catch (const json::exception& e) {
    throw CorruptModel(std::string("gan: ") + e.what());
  }
  if (g.generator.input_dim() != g.noise_dim || g.scaler.mean.size() != g.generator.output_dim())
    throw CorruptModel("gan: layer shapes do not match noise_dim or scaler");
  return g;
}

void save_gan(const Gan& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write gan checkpoint " + path.string());
  out << to_json(g).dump() << '\n';
}

Gan load_gan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gan checkpoint " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CorruptModel(path.string() + ": " + e.what());
  }
  return gan_from_json(j);
}

std::string gan_filename(std::string_view user, std::string_view role) {
  return std::string(user) + "_" + std::string(role) + ".gan.json";
}

}  // namespace tcas::gan

#include "tcas/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "tcas/errors.hpp"
#include "tcas/seeding.hpp"

namespace tcas::pipeline {

using nlohmann::json;
using learners::Algorithm;

std::string_view to_string(Mode m) { return m == Mode::vanilla ? "vanilla" : "gan"; }

Mode parse_mode(std::string_view s) {
  if (s == "vanilla") return Mode::vanilla;
  if (s == "gan") return Mode::gan;
  throw ConfigError("mode must be vanilla or gan, got '" + std::string(s) + "'");
}

namespace {

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown config key '" + (where.empty() ? k : std::string(where) + "." + k) + "'");
  }
}

template <typename T>
void read(const json& j, std::string_view name, T& out, std::string_view where) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(where) + "." + std::string(name) +
                      "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, "", {"master_seed", "datasets", "device", "window", "split", "balance", "attack",
                     "learners", "gan", "output_dir", "jobs"});
  RunConfig c;
  if (!j.contains("master_seed")) throw ConfigError("config key 'master_seed' is required");
  read(j, "master_seed", c.master_seed, "");
  if (j.contains("datasets")) {
    const auto& d = j.at("datasets");
    check_keys(d, "datasets", {"primary", "attack"});
    read(d, "primary", c.primary_path, "datasets");
    if (d.contains("attack") && !d.at("attack").is_null()) {
      std::string a;
      read(d, "attack", a, "datasets");
      c.attack_path = a;
    }
  }
  if (j.contains("device") && !j.at("device").is_null()) {
    std::string dev;
    read(j, "device", dev, "");
    c.device = parse_device(dev);
  }
  if (j.contains("window")) {
    const auto& w = j.at("window");
    check_keys(w, "window", {"p", "q"});
    read(w, "p", c.window.p, "window");
    read(w, "q", c.window.q, "window");
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, "split", {"train_fraction", "ordering", "min_swipes"});
    read(s, "train_fraction", c.split.train_fraction, "split");
    std::string ordering(eval::to_string(c.split.ordering));
    read(s, "ordering", ordering, "split");
    c.split.ordering = eval::parse_ordering(ordering);
    read(s, "min_swipes", c.split.min_items, "split");
  }
  if (j.contains("balance")) {
    const auto& b = j.at("balance");
    check_keys(b, "balance", {"k", "beta", "per_impostor"});
    read(b, "k", c.adasyn.k, "balance");
    read(b, "beta", c.adasyn.beta, "balance");
    read(b, "per_impostor", c.per_impostor, "balance");
  }
  if (j.contains("attack")) {
    const auto& a = j.at("attack");
    check_keys(a, "attack", {"n", "spread"});
    read(a, "n", c.attack.n, "attack");
    read(a, "spread", c.attack.spread, "attack");
  }
  if (j.contains("learners")) {
    const auto& l = j.at("learners");
    check_keys(l, "learners", {"algorithms", "folds", "tune", "grids"});
    if (l.contains("algorithms")) {
      std::vector<std::string> names;
      read(l, "algorithms", names, "learners");
      c.algorithms.clear();
      for (const auto& n : names) c.algorithms.push_back(learners::parse_algorithm(n));
    }
    read(l, "folds", c.folds, "learners");
    read(l, "tune", c.tune, "learners");
    if (l.contains("grids")) {
      const auto& g = l.at("grids");
      if (!g.is_object()) throw ConfigError("learners.grids must be an object");
      for (const auto& [name, grid] : g.items())
        c.grids[learners::parse_algorithm(name)] = learners::HyperGrid::from_json(grid);
    }
  }
  if (j.contains("gan")) {
    json g = j.at("gan");
    if (!g.is_object()) throw ConfigError("gan must be a JSON object");
    if (g.contains("enabled")) {
      read(g, "enabled", c.gan_enabled, "gan");
      g.erase("enabled");
    }
    check_keys(g, "gan", {"noise_dim", "generator_widths", "discriminator_widths", "epochs",
                          "batch_size", "learning_rate", "beta1", "n_samples", "quality_band",
                          "patience", "min_epochs", "holdout"});
    c.gan = gan::gan_config_from_json(g, c.gan);
  }
  read(j, "output_dir", c.output_dir, "");
  read(j, "jobs", c.jobs, "");
  c.validate();
  return c;
}

void RunConfig::validate() const {
  window.validate();
  split.validate();
  adasyn.validate();
  attack.validate();
  gan.validate();
  if (per_impostor < 1) throw ConfigError("balance.per_impostor must be >= 1");
  if (folds < 2) throw ConfigError("learners.folds must be >= 2");
  if (algorithms.empty()) throw ConfigError("learners.algorithms must not be empty");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
}

json RunConfig::to_json() const {
  json grids_json = json::object();
  for (auto a : algorithms) grids_json[std::string(learners::to_string(a))] = grid(a).to_json();
  std::vector<std::string> algos;
  for (auto a : algorithms) algos.emplace_back(learners::to_string(a));
  json g = gan::to_json(gan);
  g.erase("seed");
  g["enabled"] = gan_enabled;
  return {{"master_seed", master_seed},
          {"device", device ? json(std::string(tcas::to_string(*device))) : json(nullptr)},
          {"window", {{"p", window.p}, {"q", window.q}}},
          {"split",
           {{"train_fraction", split.train_fraction},
            {"ordering", eval::to_string(split.ordering)},
            {"min_swipes", split.min_items}}},
          {"balance", {{"k", adasyn.k}, {"beta", adasyn.beta}, {"per_impostor", per_impostor}}},
          {"attack", {{"n", attack.n}, {"spread", attack.spread}}},
          {"learners", {{"algorithms", algos}, {"folds", folds}, {"tune", tune}, {"grids", grids_json}}},
          {"gan", g}};
}

learners::HyperGrid RunConfig::grid(Algorithm a) const {
  auto it = grids.find(a);
  return it != grids.end() ? it->second : learners::default_grid(a);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        // Keep the lowest failing index so the reported error is schedule-independent.
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

windowing::WindowSet merge(const windowing::WindowSet& a, const windowing::WindowSet& b) {
  windowing::WindowSet out = a;
  for (const auto& [user, w] : b) {
    auto& dst = out[user];
    dst.insert(dst.end(), w.begin(), w.end());
  }
  return out;
}

Prepared prepare(const features::FeatureSet& swipes, const RunConfig& cfg) {
  auto split_cfg = cfg.split;
  split_cfg.seed = derive_seed(cfg.master_seed, "split");
  const auto part = eval::split(swipes, split_cfg);
  Prepared p;
  p.dropped = part.dropped;
  for (const auto& u : part.dropped)
    p.warnings.push_back("user " + u + " dropped: fewer than " +
                         std::to_string(split_cfg.min_items) + " swipes");
  auto train = windowing::windows(part.train, cfg.window, &p.warnings);
  auto test = windowing::windows(part.test, cfg.window, &p.warnings);
  for (auto& [user, w] : train) {
    auto it = test.find(user);
    if (w.empty() || it == test.end() || it->second.empty()) {
      p.dropped.push_back(user);
      p.warnings.push_back("user " + user + " dropped: no windows in one partition");
      continue;
    }
    p.train[user] = std::move(w);
    p.test[user] = std::move(it->second);
  }
  std::sort(p.dropped.begin(), p.dropped.end());
  return p;
}

namespace {

json cv_json(const learners::TuneResult& t) {
  json cands = json::array();
  for (const auto& c : t.candidates)
    cands.push_back({{"params", c.params}, {"fold_scores", c.fold_scores}, {"mean", c.mean}});
  return {{"best", t.best}, {"best_score", t.best_score}, {"candidates", cands}};
}

learners::ClassifierModel fit_one(Algorithm a, const Matrix& X, const Eigen::VectorXi& y,
                                  const RunConfig& cfg, const std::string& user, Mode mode) {
  const std::string stage = "learn/" + std::string(to_string(mode)) + "/" +
                            std::string(learners::to_string(a));
  const auto seed = derive_seed(cfg.master_seed, stage, user);
  const auto grid = cfg.grid(a);
  json params;
  json cv = nullptr;
  if (cfg.tune) {
    const auto res = learners::tune(a, X, y, grid, cfg.folds, derive_seed(seed, "tune"));
    params = res.best;
    cv = cv_json(res);
  } else {
    params = grid.candidates(a).front();
  }
  auto m = learners::train(a, X, y, params, seed);
  m.metadata["user"] = user;
  m.metadata["mode"] = to_string(mode);
  m.metadata["cv"] = cv;
  m.metadata["training_rows"] = X.rows();
  return m;
}

json curves_json(const gan::Curves& c) {
  return {{"epochs_run", c.epochs_run}, {"early_stop", c.early_stop}, {"e1", c.e1},
          {"e2", c.e2},                 {"value", c.value},           {"accuracy", c.accuracy}};
}

}  // namespace

UserModels train_user(const windowing::WindowSet& train, const std::string& user,
                      const RunConfig& cfg) {
  auto own = train.find(user);
  if (own == train.end() || own->second.empty())
    throw InsufficientData("user " + user + " has no training windows");
  const Matrix G = windowing::stack(own->second);
  const auto imp = balance::undersample_impostors(
      train, user, cfg.per_impostor, derive_seed(cfg.master_seed, "balance/undersample", user));
  if (imp.empty()) throw InsufficientData("user " + user + ": no impostor windows available");
  const Matrix I = windowing::stack(imp);
  auto ac = cfg.adasyn;
  ac.seed = derive_seed(cfg.master_seed, "balance/adasyn", user);
  const auto bal = balance::balance_training_set(G, I, ac);
  const json balance_info = {{"genuine_real", bal.genuine_real},
                             {"impostor_real", bal.impostor_real},
                             {"oversampled", bal.oversampled},
                             {"synthetic", bal.synthetic},
                             {"trimmed", bal.trimmed},
                             {"per_class", bal.X.rows() / 2}};

  UserModels out;
  out.user = user;
  for (auto a : cfg.algorithms) {
    auto m = fit_one(a, bal.X, bal.y, cfg, user, Mode::vanilla);
    m.metadata["balance"] = balance_info;
    out.models.push_back({a, Mode::vanilla, std::move(m)});
  }
  if (!cfg.gan_enabled) return out;

  const Matrix Gb = bal.genuine(), Ib = bal.impostor();
  auto gc = cfg.gan;
  gc.seed = derive_seed(cfg.master_seed, "gan/legit", user);
  gan::GanPair pair;
  pair.legitimate = gan::train_gan(Gb, gc);
  gc.seed = derive_seed(cfg.master_seed, "gan/adv", user);
  pair.adversarial = gan::train_gan(Ib, gc);
  const auto aug = gan::augment_training_set(Gb, Ib, pair, cfg.gan.n_samples,
                                             derive_seed(cfg.master_seed, "gan/augment", user));
  const auto util = gan::utility_check(Gb, Ib, pair, cfg.gan.n_samples,
                                       derive_seed(cfg.master_seed, "gan/utility", user));
  const json gan_info = {
      {"n_samples", cfg.gan.n_samples},
      {"legitimate", {{"epochs_run", pair.legitimate.curves.epochs_run},
                      {"early_stop", pair.legitimate.curves.early_stop}}},
      {"adversarial", {{"epochs_run", pair.adversarial.curves.epochs_run},
                       {"early_stop", pair.adversarial.curves.early_stop}}},
      {"utility", {{"real_only", util.real_only},
                   {"augmented", util.augmented},
                   {"ratio", util.ratio},
                   {"passed", util.passed}}}};
  for (auto a : cfg.algorithms) {
    auto m = fit_one(a, aug.X, aug.y, cfg, user, Mode::gan);
    m.metadata["balance"] = balance_info;
    m.metadata["gan"] = gan_info;
    out.models.push_back({a, Mode::gan, std::move(m)});
  }
  out.gans = std::move(pair);
  return out;
}

std::vector<UserModels> train_all(const windowing::WindowSet& train, const RunConfig& cfg) {
  std::vector<std::string> users;
  for (const auto& [u, w] : train) users.push_back(u);
  if (users.size() < 2) throw InsufficientData("training needs at least 2 users");
  std::vector<UserModels> out(users.size());
  parallel_for(users.size(), cfg.jobs, [&](std::size_t i) { out[i] = train_user(train, users[i], cfg); });
  return out;
}

std::vector<attacks::AttackSet> population_sets(const windowing::WindowSet& primary_all,
                                                const std::string& primary_id,
                                                const windowing::WindowSet* attack,
                                                const std::string& attack_id,
                                                const RunConfig& cfg) {
  std::vector<attacks::AttackSet> out;
  auto pc = cfg.attack;
  pc.seed = derive_seed(cfg.master_seed, "attack", "population_same");
  const attacks::AttackSource primary{primary_id, &primary_all};
  out.push_back(attacks::build_attack_set(attacks::Scenario::population_same, primary, std::nullopt, pc));
  if (attack) {
    pc.seed = derive_seed(cfg.master_seed, "attack", "population_different");
    out.push_back(attacks::build_attack_set(attacks::Scenario::population_different, primary,
                                            attacks::AttackSource{attack_id, attack}, pc));
  }
  return out;
}

eval::EvalReport evaluate(const std::vector<UserModels>& users, const windowing::WindowSet& test,
                          const std::vector<attacks::AttackSet>& population, int jobs) {
  std::vector<std::vector<eval::ReportRow>> rows(users.size());
  parallel_for(users.size(), jobs, [&](std::size_t i) {
    const auto& u = users[i];
    auto own = test.find(u.user);
    if (own == test.end() || own->second.empty())
      throw EmptyScores("user " + u.user + " has no test windows");
    const Matrix genuine = windowing::stack(own->second);
    const auto zero = attacks::zero_effort_set(test, u.user);
    for (const auto& tm : u.models) {
      const std::string algo(learners::to_string(tm.algorithm));
      const std::string mode(to_string(tm.mode));
      const auto base = eval::metrics(learners::predict_scores(tm.model, genuine),
                                      learners::predict_scores(tm.model, zero.vectors));
      rows[i].push_back({u.user, algo, mode, "zero_effort", base.far, base.frr, base.hter,
                         static_cast<std::size_t>(genuine.rows()),
                         static_cast<std::size_t>(zero.vectors.rows())});
      for (const auto& p : population) {
        const double far = eval::far(learners::predict_scores(tm.model, p.vectors));
        rows[i].push_back({u.user, algo, mode, std::string(attacks::to_string(p.scenario)), far,
                           base.frr, eval::hter(far, base.frr), 0,
                           static_cast<std::size_t>(p.vectors.rows())});
      }
    }
  });
  eval::EvalReport r;
  for (auto& v : rows) r.rows.insert(r.rows.end(), v.begin(), v.end());
  r.sort_rows();
  for (const auto& u : users) r.users[u.user] = user_details(u);
  json attack_meta = json::array();
  for (const auto& p : population)
    attack_meta.push_back({{"scenario", attacks::to_string(p.scenario)},
                           {"source", p.source},
                           {"vectors", p.vectors.rows()},
                           {"config", p.config}});
  r.meta["threshold"] = eval::kThreshold;
  r.meta["decision_unit"] = "window";
  r.meta["aggregation"] = "unweighted mean over users";
  r.meta["attack_sets"] = attack_meta;
  return r;
}

json user_details(const UserModels& u) {
  json d = json::object();
  json models = json::object();
  for (const auto& tm : u.models) {
    const auto& md = tm.model.metadata;
    json m = {{"hyperparams", tm.model.hyperparams}};
    if (md.contains("cv") && !md.at("cv").is_null()) m["cv_best_score"] = md.at("cv").at("best_score");
    if (md.contains("warnings")) m["warnings"] = md.at("warnings");
    models[std::string(learners::to_string(tm.algorithm)) + "/" + std::string(to_string(tm.mode))] = m;
    if (md.contains("balance")) d["balance"] = md.at("balance");
    if (md.contains("gan")) d["gan"] = md.at("gan");
  }
  d["models"] = models;
  if (u.gans) {
    d["gan_curves"] = {{"legitimate", curves_json(u.gans->legitimate.curves)},
                       {"adversarial", curves_json(u.gans->adversarial.curves)}};
  }
  return d;
}

eval::EvalReport run_scenario_matrix(const features::FeatureSet& primary,
                                     const std::string& primary_id, Device device,
                                     const features::FeatureSet* attack,
                                     const std::string& attack_id, const RunConfig& cfg,
                                     std::vector<UserModels>* models_out) {
  cfg.validate();
  if (attack && attack_id == primary_id)
    throw MissingDataset("population_different needs a dataset distinct from the primary");
  auto prep = prepare(primary, cfg);
  if (prep.train.size() < 2) throw InsufficientData("fewer than 2 users survive the split");
  const auto all = merge(prep.train, prep.test);
  std::optional<windowing::WindowSet> attack_windows;
  if (attack) attack_windows = windowing::windows(*attack, cfg.window, &prep.warnings);
  const auto pop = population_sets(all, primary_id, attack_windows ? &*attack_windows : nullptr,
                                   attack_id, cfg);
  auto models = train_all(prep.train, cfg);
  auto report = evaluate(models, prep.test, pop, cfg.jobs);
  report.meta["primary_dataset"] = primary_id;
  report.meta["attack_dataset"] = attack ? json(attack_id) : json(nullptr);
  report.meta["device"] = tcas::to_string(device);
  report.meta["config"] = cfg.to_json();
  report.meta["dropped_users"] = prep.dropped;
  report.meta["warnings"] = prep.warnings;
  report.meta["balancing_unit"] = "window";
  report.meta["gan_input_unit"] = "window";
  if (models_out) *models_out = std::move(models);
  return report;
}

}  // namespace tcas::pipeline

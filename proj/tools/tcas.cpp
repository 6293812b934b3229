// Batch front end. Every command reads files, writes files under --out-dir
// and leaves a manifest next to its outputs. Exit codes: 0 success, 2 bad
// configuration, 3 bad data.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "manifest.hpp"
#include "tcas/attacks.hpp"
#include "tcas/errors.hpp"
#include "tcas/ingest.hpp"
#include "tcas/pipeline.hpp"
#include "tcas/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tcas;

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open input file " + p.string());
  return in;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
}

json read_json(const fs::path& p) {
  auto in = open_in(p);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

struct Common {
  std::string out_dir = "out";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;

  fs::path dir() const {
    fs::create_directories(out_dir);
    return out_dir;
  }

  // Config file first, flags on top.
  pipeline::RunConfig run_config() const {
    json j = config.empty() ? json::object() : read_json(config);
    if (seed) j["master_seed"] = *seed;
    if (jobs) j["jobs"] = *jobs;
    return pipeline::RunConfig::from_json(j);
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_config) {
  cmd->add_option("--out-dir", c.out_dir, "Directory for all outputs")->capture_default_str();
  if (!with_config) return;
  cmd->add_option("--config", c.config, "JSON run configuration");
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config file)");
  cmd->add_option("--jobs", c.jobs, "Worker threads (results do not depend on it)");
}

windowing::WindowSet read_windows(const fs::path& p, Device* device = nullptr) {
  auto in = open_in(p);
  const auto file = features::read_feature_csv(in);
  if (device && !file.rows.empty()) *device = file.rows.front().device;
  return windowing::from_feature_set(file.by_user());
}

void write_windows(const fs::path& p, const windowing::WindowSet& set) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  features::write_feature_csv(out, windowing::flatten(set), "window_id");
}

// ---- commands ------------------------------------------------------------

struct SynthArgs {
  Common c;
  std::size_t users = 20, swipes = 200;
  std::string device = "phone";
  std::uint64_t seed = 7;
};

void cmd_synth(const SynthArgs& a) {
  ingest::SynthConfig sc;
  sc.n_users = a.users;
  sc.swipes_per_user = a.swipes;
  sc.device = parse_device(a.device);
  sc.seed = a.seed;
  const auto ds = ingest::synth_dataset(sc);
  const auto dir = a.c.dir();
  const auto path = dir / "events.csv";
  std::ofstream out(path);
  ingest::write_events_csv(out, ds);
  out.close();
  cli::Manifest m("synth");
  m.config({{"users", a.users}, {"swipes", a.swipes}, {"device", a.device}, {"seed", a.seed},
            {"dataset_id", ds.id}});
  m.output(path);
  m.write(dir);
}

struct IngestArgs {
  Common c;
  std::string events, device = "phone", column_map, id = "primary";
  std::size_t min_points = 6;
};

void cmd_ingest(const IngestArgs& a) {
  const Device device = parse_device(a.device);
  ingest::ColumnMap cols;
  if (!a.column_map.empty()) {
    const auto j = read_json(a.column_map);
    try {
      cols.canonical_to_source = j.get<std::map<std::string, std::string>>();
    } catch (const json::exception&) {
      throw ConfigError("--column-map must map canonical names to source names");
    }
  }
  if (a.min_points < 1) throw ConfigError("--min-points must be >= 1");
  auto in = open_in(a.events);
  const auto streams = ingest::parse_events(in, cols);
  std::vector<ingest::Swipe> swipes;
  ingest::SegmentationReport seg;
  for (const auto& s : streams) {
    if (s.device != device) continue;
    auto r = ingest::segment_swipes(s);
    seg += r.report;
    for (auto& sw : r.swipes) swipes.push_back(std::move(sw));
  }
  const std::size_t total = swipes.size();
  auto filtered = ingest::filter_taps(std::move(swipes), a.min_points);
  const auto ds = ingest::assemble_dataset(std::move(filtered.kept), device, a.id);

  const auto dir = a.c.dir();
  const auto path = dir / "swipes.csv";
  {
    std::ofstream out(path);
    ingest::write_swipes_csv(out, ds);
  }
  const json report = {{"dataset_id", a.id},
                       {"device", a.device},
                       {"swipes_segmented", total},
                       {"orphan_events", seg.orphan_events},
                       {"overlapping_downs", seg.overlapping_downs},
                       {"duplicate_timestamps", seg.duplicate_timestamps},
                       {"unterminated", seg.unterminated},
                       {"min_points", a.min_points},
                       {"removed_count", filtered.removed_count},
                       {"removed_fraction", filtered.removed_fraction},
                       {"swipes_kept", ds.swipe_count()},
                       {"users", ds.users.size()}};
  const auto rpath = dir / "segmentation.json";
  write_text(rpath, report.dump(2) + "\n");
  cli::Manifest m("ingest");
  m.config({{"device", a.device}, {"min_points", a.min_points}, {"id", a.id},
            {"column_map", cols.canonical_to_source}});
  m.input(a.events);
  if (!a.column_map.empty()) m.input(a.column_map);
  m.output(path);
  m.output(rpath);
  m.write(dir);
}

struct ExtractArgs {
  Common c;
  std::string swipes;
};

void cmd_extract(const ExtractArgs& a) {
  auto in = open_in(a.swipes);
  const auto ds = ingest::read_swipes_csv(in);
  features::ExtractionReport rep;
  const auto set = features::extract_all(ds, &rep);
  const auto dir = a.c.dir();
  const auto path = dir / "features.csv";
  {
    std::ofstream out(path);
    features::write_feature_csv(out, set);
  }
  cli::Manifest m("extract");
  m.config({{"extracted", rep.extracted}, {"degenerate", rep.degenerate}});
  m.input(a.swipes);
  m.output(path);
  m.write(dir);
  if (rep.degenerate > 0)
    std::cerr << "warning: " << rep.degenerate << " degenerate swipes skipped\n";
}

struct WindowArgs {
  Common c;
  std::string features;
};

void cmd_window(const WindowArgs& a) {
  const auto cfg = a.c.run_config();
  auto in = open_in(a.features);
  const auto file = features::read_feature_csv(in);
  const auto prep = pipeline::prepare(file.by_user(), cfg);
  for (const auto& w : prep.warnings) std::cerr << "warning: " << w << '\n';
  const auto dir = a.c.dir();
  const auto tr = dir / "windows_train.csv", te = dir / "windows_test.csv";
  write_windows(tr, prep.train);
  write_windows(te, prep.test);
  cli::Manifest m("window");
  m.config(cfg.to_json());
  m.input(a.features);
  if (!a.c.config.empty()) m.input(a.c.config);
  m.output(tr);
  m.output(te);
  m.write(dir);
}

struct TrainArgs {
  Common c;
  std::string windows;
};

void cmd_train(const TrainArgs& a) {
  const auto cfg = a.c.run_config();
  const auto train = read_windows(a.windows);
  const auto users = pipeline::train_all(train, cfg);
  const auto dir = a.c.dir();
  fs::create_directories(dir / "models");
  cli::Manifest m("train");
  m.config(cfg.to_json());
  m.input(a.windows);
  if (!a.c.config.empty()) m.input(a.c.config);
  for (const auto& u : users) {
    for (const auto& tm : u.models) {
      const auto p = dir / "models" / learners::model_filename(u.user, tm.algorithm, pipeline::to_string(tm.mode));
      learners::save_model(tm.model, p);
      m.output(p);
    }
    if (u.gans) {
      fs::create_directories(dir / "gans");
      const auto l = dir / "gans" / gan::gan_filename(u.user, "legit");
      const auto r = dir / "gans" / gan::gan_filename(u.user, "adv");
      gan::save_gan(u.gans->legitimate, l);
      gan::save_gan(u.gans->adversarial, r);
      m.output(l);
      m.output(r);
    }
  }
  m.write(dir);
}

struct AttackArgs {
  Common c;
  std::string scenario = "population_same";
  std::vector<std::string> windows;
  std::string source_features, source_id = "attack", dataset_id = "primary";
};

void cmd_attack(const AttackArgs& a) {
  const auto cfg = a.c.run_config();
  const auto scenario = attacks::parse_scenario(a.scenario);
  if (scenario == attacks::Scenario::zero_effort)
    throw ConfigError("--scenario zero_effort is derived at evaluation time; use a population scenario");
  if (a.windows.empty()) throw ConfigError("--windows is required");
  windowing::WindowSet all;
  Device device = Device::phone;
  for (const auto& w : a.windows) all = pipeline::merge(all, read_windows(w, &device));
  std::optional<windowing::WindowSet> source;
  if (scenario == attacks::Scenario::population_different) {
    if (a.source_features.empty())
      throw MissingDataset("population_different needs --source-features (a second dataset)");
    auto in = open_in(a.source_features);
    source = windowing::windows(features::read_feature_csv(in).by_user(), cfg.window);
  }
  auto sets = pipeline::population_sets(all, a.dataset_id, source ? &*source : nullptr,
                                        a.source_id, cfg);
  const auto& set = scenario == attacks::Scenario::population_same ? sets.front() : sets.back();
  const auto dir = a.c.dir();
  const auto path = dir / ("attack_" + a.scenario + ".csv");
  {
    std::ofstream out(path);
    attacks::write_attack_csv(out, set, device);
  }
  cli::Manifest m("attack_" + a.scenario);
  m.config({{"run", cfg.to_json()}, {"attack", set.config}, {"source", set.source}});
  for (const auto& w : a.windows) m.input(w);
  if (!a.source_features.empty()) m.input(a.source_features);
  m.output(path);
  m.write(dir);
}

struct EvaluateArgs {
  Common c;
  std::string models, gans, test, dataset_id = "primary";
  std::vector<std::string> scenarios;
  std::vector<std::string> attack_features;
};

void cmd_evaluate(const EvaluateArgs& a) {
  const auto cfg = a.c.run_config();
  std::vector<attacks::AttackSet> loaded;
  for (const auto& p : a.attack_features) {
    auto in = open_in(p);
    loaded.push_back(attacks::read_attack_csv(in));
  }
  std::vector<attacks::AttackSet> population;
  std::vector<std::string> scenarios = a.scenarios;
  if (scenarios.empty())
    for (const auto& s : loaded) scenarios.emplace_back(attacks::to_string(s.scenario));
  for (const auto& name : scenarios) {
    const auto s = attacks::parse_scenario(name);
    if (s == attacks::Scenario::zero_effort) continue;
    auto it = std::find_if(loaded.begin(), loaded.end(), [&](const auto& x) { return x.scenario == s; });
    if (it == loaded.end())
      throw ConfigError("--scenario " + name + " requires --attack-features with a " + name +
                        " attack file");
    if (std::none_of(population.begin(), population.end(), [&](const auto& x) { return x.scenario == s; }))
      population.push_back(*it);
  }
  std::sort(population.begin(), population.end(),
            [](const auto& x, const auto& y) { return x.scenario < y.scenario; });

  Device device = Device::phone;
  const auto test = read_windows(a.test, &device);
  if (a.models.empty()) throw ConfigError("--models is required");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.models))
    if (e.path().string().ends_with(".model.json")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, pipeline::UserModels> by_user;
  for (const auto& f : files) {
    auto model = learners::load_model(f);
    const auto user = model.metadata.value("user", std::string());
    const auto mode = pipeline::parse_mode(model.metadata.value("mode", std::string("vanilla")));
    if (user.empty()) throw CorruptModel(f.string() + ": metadata has no user");
    auto& u = by_user[user];
    u.user = user;
    u.models.push_back({model.algorithm, mode, std::move(model)});
  }
  if (by_user.empty()) throw ConfigError("no *.model.json files in " + a.models);
  std::vector<pipeline::UserModels> users;
  for (auto& [name, u] : by_user) {
    std::sort(u.models.begin(), u.models.end(), [](const auto& x, const auto& y) {
      return std::pair(x.mode, x.algorithm) < std::pair(y.mode, y.algorithm);
    });
    if (!a.gans.empty()) {
      const auto l = fs::path(a.gans) / gan::gan_filename(name, "legit");
      const auto r = fs::path(a.gans) / gan::gan_filename(name, "adv");
      if (fs::exists(l) && fs::exists(r)) u.gans = gan::GanPair{gan::load_gan(l), gan::load_gan(r)};
    }
    users.push_back(std::move(u));
  }
  auto report = pipeline::evaluate(users, test, population, cfg.jobs);
  report.meta["primary_dataset"] = a.dataset_id;
  report.meta["device"] = to_string(device);
  report.meta["config"] = cfg.to_json();

  const auto dir = a.c.dir();
  const auto path = dir / "report.json";
  write_text(path, eval::to_json(report).dump(2) + "\n");
  cli::Manifest m("evaluate");
  m.config(cfg.to_json());
  m.input(a.test);
  for (const auto& f : files) m.input(f);
  for (const auto& p : a.attack_features) m.input(p);
  m.output(path);
  m.write(dir);
}

struct ReportArgs {
  Common c;
  std::string report, format = "md";
};

void cmd_report(const ReportArgs& a) {
  const auto r = eval::report_from_json(read_json(a.report));
  std::string text;
  if (a.format == "md") text = eval::to_markdown(r);
  else if (a.format == "csv") text = eval::to_csv(r);
  else if (a.format == "json") text = eval::to_json(r).dump(2) + "\n";
  else throw ConfigError("--format must be md, csv or json");
  const auto dir = a.c.dir();
  const auto path = dir / ("report." + a.format);
  write_text(path, text);
  std::cout << text;
  cli::Manifest m("report_" + a.format);
  m.input(a.report);
  m.output(path);
  m.write(dir);
}

struct PcaArgs {
  Common c;
  std::string windows, user, gans;
};

void cmd_pca(const PcaArgs& a) {
  const auto cfg = a.c.run_config();
  const auto train = read_windows(a.windows);
  auto own = train.find(a.user);
  if (own == train.end()) throw ConfigError("--user " + a.user + " not found in " + a.windows);
  const Matrix G = windowing::stack(own->second);
  const Matrix I = windowing::stack(balance::undersample_impostors(
      train, a.user, cfg.per_impostor, derive_seed(cfg.master_seed, "balance/undersample", a.user)));
  std::vector<std::string> labels;
  std::vector<Matrix> blocks = {G, I};
  labels.insert(labels.end(), static_cast<std::size_t>(G.rows()), "genuine");
  labels.insert(labels.end(), static_cast<std::size_t>(I.rows()), "impostor");
  if (!a.gans.empty()) {
    const auto l = gan::load_gan(fs::path(a.gans) / gan::gan_filename(a.user, "legit"));
    const auto r = gan::load_gan(fs::path(a.gans) / gan::gan_filename(a.user, "adv"));
    const auto n = cfg.gan.n_samples;
    blocks.push_back(gan::sample(l, n, derive_seed(cfg.master_seed, "pca/legit", a.user)));
    blocks.push_back(gan::sample(r, n, derive_seed(cfg.master_seed, "pca/adv", a.user)));
    labels.insert(labels.end(), n, "gan_genuine");
    labels.insert(labels.end(), n, "gan_impostor");
  }
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Matrix X(rows, G.cols());
  rows = 0;
  for (const auto& b : blocks) {
    X.middleRows(rows, b.rows()) = b;
    rows += b.rows();
  }
  // Features differ in scale by orders of magnitude; project z-scores.
  const auto scaler = features::Standardizer::fit(X);
  const auto p = eval::pca_top2(scaler.transform(X));
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
  const auto dir = a.c.dir();
  const auto path = dir / ("pca_" + a.user + ".csv");
  {
    std::ofstream out(path);
    eval::write_pca_csv(out, labels, p.projected);
  }
  cli::Manifest m("pca_" + a.user);
  m.config({{"user", a.user},
            {"explained_variance", {p.explained(0), p.explained(1)}},
            {"degenerate", p.degenerate}});
  m.input(a.windows);
  m.output(path);
  m.write(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Touch-based continuous authentication: features, attacks, GAN-augmented verifiers"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic raw-event dataset");
  add_common(s, synth.c, false);
  s->add_option("--users", synth.users)->capture_default_str();
  s->add_option("--swipes", synth.swipes, "Swipes per user")->capture_default_str();
  s->add_option("--device", synth.device)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();

  IngestArgs ingest_a;
  auto* in = app.add_subcommand("ingest", "Segment raw events into swipes and drop taps");
  add_common(in, ingest_a.c, false);
  in->add_option("--events", ingest_a.events, "Raw event CSV")->required();
  in->add_option("--device", ingest_a.device)->capture_default_str();
  in->add_option("--min-points", ingest_a.min_points)->capture_default_str();
  in->add_option("--column-map", ingest_a.column_map, "JSON canonical->source column names");
  in->add_option("--id", ingest_a.id, "Dataset identifier")->capture_default_str();

  ExtractArgs extract;
  auto* ex = app.add_subcommand("extract", "Compute the 47 swipe features");
  add_common(ex, extract.c, false);
  ex->add_option("--swipes", extract.swipes, "Segmented swipe CSV")->required();

  WindowArgs window;
  auto* wi = app.add_subcommand("window", "Split per user and build sliding windows");
  add_common(wi, window.c, true);
  wi->add_option("--features", window.features, "Swipe feature CSV")->required();

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Train vanilla and GAN-augmented verifiers per user");
  add_common(tr, train.c, true);
  tr->add_option("--windows", train.windows, "Training window CSV")->required();

  AttackArgs attack;
  auto* at = app.add_subcommand("attack", "Generate a population attack set");
  add_common(at, attack.c, true);
  at->add_option("--scenario", attack.scenario)->capture_default_str();
  at->add_option("--windows", attack.windows, "Window CSVs of the primary dataset")->required();
  at->add_option("--source-features", attack.source_features, "Feature CSV of a second dataset");
  at->add_option("--source-id", attack.source_id)->capture_default_str();
  at->add_option("--dataset-id", attack.dataset_id)->capture_default_str();

  EvaluateArgs evaluate;
  auto* ev = app.add_subcommand("evaluate", "Score models against zero-effort and population attacks");
  add_common(ev, evaluate.c, true);
  ev->add_option("--models", evaluate.models, "Directory of *.model.json")->required();
  ev->add_option("--gans", evaluate.gans, "Directory of GAN checkpoints (training curves)");
  ev->add_option("--test", evaluate.test, "Test window CSV")->required();
  ev->add_option("--scenario", evaluate.scenarios, "Population scenarios to score");
  ev->add_option("--attack-features", evaluate.attack_features, "Attack CSVs from `attack`");
  ev->add_option("--dataset-id", evaluate.dataset_id)->capture_default_str();

  ReportArgs report;
  auto* re = app.add_subcommand("report", "Render an evaluation report");
  add_common(re, report.c, false);
  re->add_option("--report", report.report, "report.json from evaluate")->required();
  re->add_option("--format", report.format, "md, csv or json")->capture_default_str();

  PcaArgs pca;
  auto* pc = app.add_subcommand("pca", "Top-two principal components of one user's training set");
  add_common(pc, pca.c, true);
  pc->add_option("--windows", pca.windows, "Training window CSV")->required();
  pc->add_option("--user", pca.user)->required();
  pc->add_option("--gans", pca.gans, "Directory of GAN checkpoints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*s) cmd_synth(synth);
    else if (*in) cmd_ingest(ingest_a);
    else if (*ex) cmd_extract(extract);
    else if (*wi) cmd_window(window);
    else if (*tr) cmd_train(train);
    else if (*at) cmd_attack(attack);
    else if (*ev) cmd_evaluate(evaluate);
    else if (*re) cmd_report(report);
    else if (*pc) cmd_pca(pca);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

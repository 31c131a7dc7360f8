// Command-line front end: graph generation, walker simulation, dataset
// shaping, training/evaluation, generalization sweeps, and PCA projections.
// Every command records a manifest with its resolved configuration, seeds,
// and input hashes so a run can be reproduced byte for byte.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwadv/dataset.hpp"
#include "qwadv/errors.hpp"
#include "qwadv/graph.hpp"
#include "qwadv/io.hpp"
#include "qwadv/net.hpp"
#include "qwadv/pca.hpp"
#include "qwadv/rng.hpp"
#include "qwadv/walk.hpp"

namespace {

using json = nlohmann::json;
using namespace qwadv;

constexpr const char* kVersion = "1.0.0";

// Relative output paths may be redirected wholesale through the
// environment; inputs are always taken as given.
std::string resolve_out(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("QWADV_OUT_DIR");
  if (!dir || !*dir) return path;
  return std::string(dir) + "/" + path;
}

struct Manifest {
  json config = json::object();
  json inputs = json::object();
  json extra = json::object();
  std::vector<std::string> outputs;

  void input(const std::string& path) {
    inputs[path] = hex64(fnv1a64(read_file(path)));
  }
  void output(const std::string& path) { outputs.push_back(path); }

  void write(const std::string& command, const std::string& primary_out) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    for (auto& [k, v] : extra.items()) j[k] = v;
    write_file(primary_out + ".manifest.json", j.dump(2) + "\n");
  }
};

std::vector<Graph> read_graph_file(const std::string& path) {
  std::vector<Graph> graphs;
  for (const auto& line : split_lines(read_file(path))) {
    if (line.empty()) continue;
    graphs.push_back(line.front() == '{' ? graph_from_json(line) : from_record(line));
  }
  if (graphs.empty()) throw std::invalid_argument("no graphs in " + path);
  return graphs;
}

json report_to_json(const EvalReport& r) {
  json j;
  j["accuracy"] = r.accuracy;
  j["loss"] = r.loss;
  j["precision"] = {r.precision[0], r.precision[1]};
  j["recall"] = {r.recall[0], r.recall[1]};
  j["f1"] = {r.f1[0], r.f1[1]};
  j["confusion"] = {{"tp", r.tp}, {"tn", r.tn}, {"fp", r.fp}, {"fn", r.fn}};
  return j;
}

int cmd_generate(const std::string& family, int nodes, int count, double p_edge,
                 std::uint64_t seed, long max_redraws, bool as_json,
                 const std::string& out_flag) {
  const GraphFamily fam = family_from_name(family);
  std::vector<Graph> graphs;
  if (fam == GraphFamily::Random) {
    if (count < 1) throw CLI::ValidationError("--count is required for random graphs");
    graphs.resize(count);
    for (int i = 0; i < count; ++i)
      graphs[i] = random_graph(nodes, p_edge, derive_seed(seed, i), max_redraws);
  } else {
    if (count > 0)
      throw CLI::ValidationError("--count applies only to random graphs");
    graphs = fam == GraphFamily::Line ? enumerate_line_graphs(nodes)
                                      : enumerate_cycle_graphs(nodes);
  }
  const std::string out = resolve_out(out_flag);
  std::string body;
  for (const auto& g : graphs)
    body += (as_json ? graph_to_json(g) : to_record(g)) + "\n";
  write_file(out, body);

  Manifest m;
  m.config = {{"family", family},      {"nodes", nodes},
              {"count", count},        {"p_edge", p_edge},
              {"seed", seed},          {"max_redraws", max_redraws},
              {"json", as_json},       {"out", out_flag}};
  m.output(out);
  m.write("generate", out);
  std::cout << "wrote " << graphs.size() << " graphs to " << out << "\n";
  return 0;
}

int cmd_simulate(const std::string& graphs_path, const std::string& pair_name,
                 const std::string& out_flag, double gamma, double dt,
                 double t_max, double p_th_flag, const std::string& qengine,
                 const std::string& cengine, std::uint64_t seed, int jobs,
                 const std::string& traj_dir_flag, const std::string& ts_flag) {
  const ClassPair pair = class_pair_from_name(pair_name);
  const std::vector<Graph> graphs = read_graph_file(graphs_path);
  const std::string out = resolve_out(out_flag);
  const std::string traj_dir = resolve_out(traj_dir_flag);

  SimConfig cfg;
  cfg.gamma = gamma;
  cfg.dt = dt;
  cfg.t_max = t_max;
  if (p_th_flag > 0) cfg.p_th = p_th_flag;
  cfg.quantum_engine =
      qengine == "lindblad" ? QuantumEngine::Lindblad : QuantumEngine::Effective;
  cfg.classical_engine =
      cengine == "rk4" ? ClassicalEngine::Rk4 : ClassicalEngine::Propagator;
  cfg.allow_early_stop = traj_dir.empty();

  struct Slot {
    std::optional<LabeledSample> sample;
    bool dropped = false;
    std::string error;
  };
  std::vector<Slot> slots(graphs.size());
  parallel_for(graphs.size(), jobs, [&](std::size_t i) {
    try {
      auto s = label_sample(graphs[i], pair, cfg);
      if (!s) {
        slots[i].dropped = true;
        return;
      }
      s->meta.seed = seed;
      s->meta.graph_id = static_cast<long long>(i);
      slots[i].sample = std::move(s);
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  });

  Dataset ds;
  ds.class_pair = pair;
  std::size_t dropped = 0, failed = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].sample) {
      ds.samples.push_back(std::move(*slots[i].sample));
    } else if (slots[i].dropped) {
      ++dropped;
    } else {
      ++failed;
      std::cerr << "graph " << i << " failed: " << slots[i].error << "\n";
    }
  }
  if (ds.samples.empty()) throw std::runtime_error("no graph produced a sample");
  ds.header.n = ds.samples.front().meta.n;
  ds.header.gamma = gamma;
  ds.header.dt = dt;
  ds.header.p_th = ds.samples.front().meta.p_th;
  // Empty unless --timestamp is given: reruns must be byte-identical.
  ds.header.timestamp = ts_flag;
  ds.header.seeds_json = json{{"run", seed}}.dump();
  save_dataset(ds, out);

  Manifest m;
  m.config = {{"graphs", graphs_path}, {"pair", pair_name},
              {"gamma", gamma},        {"dt", dt},
              {"t_max", t_max},        {"p_th", p_th_flag},
              {"quantum_engine", qengine}, {"classical_engine", cengine},
              {"seed", seed},          {"trajectories", traj_dir_flag},
              {"timestamp", ds.header.timestamp}, {"out", out_flag}};
  m.input(graphs_path);
  m.output(out);

  if (!traj_dir.empty()) {
    std::filesystem::create_directories(traj_dir);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      if (!slots[i].sample && !slots[i].dropped && !slots[i].error.empty())
        continue;
      for (WalkerKind kind : {pair_walker_a(pair), pair_walker_b(pair)}) {
        WalkResult r = run_walker(graphs[i], kind, cfg);
        const std::string stem = traj_dir + "/graph_" + std::to_string(i) +
                                 "_" + walker_name(kind);
        write_file(stem + ".csv", trajectory_csv(r));
        write_file(stem + ".json",
                   result_sidecar_json(r, gamma,
                                       cfg.p_th ? *cfg.p_th
                                                : threshold_for(graphs[i].n)));
        m.output(stem + ".csv");
        m.output(stem + ".json");
      }
    }
  }
  m.extra["summary"] = {{"labeled", ds.samples.size()},
                        {"dropped", dropped},
                        {"failed", failed}};
  m.write("simulate", out);
  std::cout << "labeled " << ds.samples.size() << " dropped " << dropped
            << " failed " << failed << "\n";
  return 0;
}

int cmd_dataset(const std::string& samples_path, const std::string& prefix_flag,
                std::uint64_t balance_seed, double split_frac,
                std::uint64_t split_seed, int augment_copies,
                std::uint64_t augment_seed, long long drop_minor,
                long long drop_major, const std::string& ts_flag) {
  if (drop_minor >= 0 && drop_major >= 0)
    throw CLI::ValidationError("--drop-minor and --drop-major are exclusive");
  Dataset ds = load_dataset(samples_path);
  const std::size_t input_count = ds.samples.size();

  ds = balance(ds, balance_seed);
  const std::size_t after_balance = ds.samples.size();
  if (drop_minor >= 0) ds = prune_by_diff(ds, PruneMode::DropMinor, drop_minor);
  if (drop_major >= 0) ds = prune_by_diff(ds, PruneMode::DropMajor, drop_major);
  const std::size_t after_prune = ds.samples.size();
  if (augment_copies > 0) ds = augment_by_shuffle(ds, augment_copies, augment_seed);
  const std::size_t after_augment = ds.samples.size();
  ds = split(ds, split_frac, split_seed);
  if (!ts_flag.empty()) ds.header.timestamp = ts_flag;

  const std::string prefix = resolve_out(prefix_flag);
  Dataset train_ds, test_ds;
  train_ds.class_pair = test_ds.class_pair = ds.class_pair;
  train_ds.header = test_ds.header = ds.header;
  train_ds.samples = ds.train_samples();
  test_ds.samples = ds.test_samples();
  save_dataset(train_ds, prefix + ".train.jsonl");
  save_dataset(test_ds, prefix + ".test.jsonl");

  auto class_counts = [](const Dataset& d) {
    long long c0 = 0, c1 = 0;
    for (const auto& s : d.samples) (s.label == 1 ? c1 : c0)++;
    return json{{"class0", c0}, {"class1", c1}};
  };
  Manifest m;
  m.config = {{"samples", samples_path},   {"out_prefix", prefix_flag},
              {"balance_seed", balance_seed}, {"split", split_frac},
              {"split_seed", split_seed},  {"augment", augment_copies},
              {"augment_seed", augment_seed}, {"drop_minor", drop_minor},
              {"drop_major", drop_major},  {"timestamp", ds.header.timestamp}};
  m.input(samples_path);
  m.output(prefix + ".train.jsonl");
  m.output(prefix + ".test.jsonl");
  m.extra["counts"] = {{"input", input_count},
                       {"after_balance", after_balance},
                       {"after_prune", after_prune},
                       {"after_augment", after_augment},
                       {"train", train_ds.samples.size()},
                       {"test", test_ds.samples.size()},
                       {"train_classes", class_counts(train_ds)},
                       {"test_classes", class_counts(test_ds)}};
  m.write("dataset", prefix);
  std::cout << "train " << train_ds.samples.size() << " test "
            << test_ds.samples.size() << "\n";
  return 0;
}

TrainConfig make_train_config(double lr, int batch, int epochs,
                              const std::string& optimizer, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.batch_size = batch;
  cfg.epochs = epochs;
  cfg.optimizer = optimizer_from_name(optimizer);
  cfg.rng_seed = seed;
  return cfg;
}

int max_sample_n(const Dataset& ds) {
  int n = 0;
  for (const auto& s : ds.samples)
    n = std::max(n, static_cast<int>(s.adjacency.rows()));
  return n;
}

int cmd_train(const std::string& train_path, const std::string& test_path,
              const std::string& arch_name_flag, const std::string& model_out_flag,
              const std::string& curves_flag, const std::string& report_flag,
              double lr, int batch, int epochs, const std::string& optimizer,
              std::uint64_t seed, int repeats, int input_size, int jobs) {
  const Arch arch = arch_from_name(arch_name_flag);
  Dataset train_ds = load_dataset(train_path);
  std::optional<Dataset> test_ds;
  if (!test_path.empty()) test_ds = load_dataset(test_path);
  if (!curves_flag.empty() && !test_ds)
    throw CLI::ValidationError("--curves requires --test");

  int n = input_size;
  if (n <= 0) {
    n = max_sample_n(train_ds);
    if (test_ds) n = std::max(n, max_sample_n(*test_ds));
  }
  const auto train_ex = to_examples(train_ds.samples, n);
  std::vector<Example> test_ex;
  if (test_ds) test_ex = to_examples(test_ds->samples, n);

  const TrainConfig base = make_train_config(lr, batch, epochs, optimizer, seed);
  const std::string model_out = resolve_out(model_out_flag);

  Manifest m;
  m.config = {{"train", train_path},  {"test", test_path},
              {"arch", arch_name_flag}, {"lr", lr},
              {"batch", batch},       {"epochs", epochs},
              {"optimizer", optimizer}, {"seed", seed},
              {"repeats", repeats},   {"input_size", n},
              {"out", model_out_flag}, {"curves", curves_flag},
              {"report", report_flag}};
  m.input(train_path);
  if (!test_path.empty()) m.input(test_path);

  json report;
  std::vector<TrainingCurves> curves;
  if (repeats <= 1) {
    Model model = build_model(arch, n, seed);
    TrainingCurves c =
        train_model(model, train_ex, base, test_ds ? &test_ex : nullptr);
    curves.push_back(c);
    save_model(model, model_out);
    if (test_ds) {
      EvalReport rep = evaluate(model, test_ex);
      report["report"] = report_to_json(rep);
      std::cout << "test accuracy " << rep.accuracy << " loss " << rep.loss << "\n";
    }
  } else {
    RepeatResult rr =
        repeat_train_evaluate(arch, n, train_ex, test_ex, base, repeats, jobs);
    curves = rr.curves;
    // Persist the first seed's model as the representative checkpoint.
    Model model = build_model(arch, n, seed);
    train_model(model, train_ex, base, nullptr);
    save_model(model, model_out);
    json runs = json::array();
    for (const auto& r : rr.reports) runs.push_back(report_to_json(r));
    report["runs"] = std::move(runs);
    report["mean"] = report_to_json(rr.stats.mean);
    report["stddev"] = report_to_json(rr.stats.stddev);
    std::cout << "mean test accuracy " << rr.stats.mean.accuracy << " +- "
              << rr.stats.stddev.accuracy << " over " << repeats << " runs\n";
  }
  m.output(model_out);
  if (!curves_flag.empty()) {
    const std::string curves_out = resolve_out(curves_flag);
    write_file(curves_out, curves_to_csv(curves));
    m.output(curves_out);
  }
  if (!report_flag.empty()) {
    const std::string report_out = resolve_out(report_flag);
    report["arch"] = arch_name_flag;
    report["repeats"] = repeats;
    write_file(report_out, report.dump(2) + "\n");
    m.output(report_out);
  }
  m.write("train", model_out);
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& test_path,
                 const std::string& report_flag) {
  Model model = load_model(model_path);
  Dataset test_ds = load_dataset(test_path);
  EvalReport rep = evaluate(model, to_examples(test_ds.samples, model.n));
  std::cout << "accuracy " << rep.accuracy << " loss " << rep.loss << "\n";
  Manifest m;
  m.config = {{"model", model_path}, {"test", test_path}, {"report", report_flag}};
  m.input(model_path);
  m.input(test_path);
  if (!report_flag.empty()) {
    const std::string out = resolve_out(report_flag);
    write_file(out, report_to_json(rep).dump(2) + "\n");
    m.output(out);
    m.write("evaluate", out);
  }
  return 0;
}

int cmd_sweep(const std::string& family, const std::string& pair_name, int train_size,
              std::vector<int> test_sizes, const std::string& arch_name_flag,
              int count, double p_edge, double gamma, double dt, double t_max,
              int augment, double lr, int batch, int epochs,
              const std::string& optimizer, std::uint64_t seed, int repeats,
              int jobs, const std::string& prefix_flag, const std::string& ts_flag) {
  const Arch arch = arch_from_name(arch_name_flag);
  const ClassPair pair = class_pair_from_name(pair_name);
  const GraphFamily fam = family_from_name(family);
  if (fam == GraphFamily::Random && count < 1)
    throw CLI::ValidationError("--count is required for random graphs");

  std::vector<int> sizes = test_sizes;
  if (std::find(sizes.begin(), sizes.end(), train_size) == sizes.end())
    sizes.insert(sizes.begin(), train_size);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  const int big_n = sizes.back();

  SimConfig cfg;
  cfg.gamma = gamma;
  cfg.dt = dt;
  cfg.t_max = t_max;

  // Label every size's graph set once, then reuse for train and test.
  std::map<int, Dataset> by_size;
  for (int s : sizes) {
    std::vector<Graph> graphs;
    if (fam == GraphFamily::Random) {
      graphs.resize(count);
      for (int i = 0; i < count; ++i)
        graphs[i] = random_graph(s, p_edge, derive_seed(seed, s * 1000003ULL + i));
    } else {
      graphs = fam == GraphFamily::Line ? enumerate_line_graphs(s)
                                        : enumerate_cycle_graphs(s);
    }
    Dataset ds;
    ds.class_pair = pair;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      auto sample = label_sample(graphs[i], pair, cfg);
      if (!sample) continue;
      sample->meta.seed = seed;
      sample->meta.graph_id = static_cast<long long>(i);
      ds.samples.push_back(std::move(*sample));
    }
    ds.header.n = s;
    ds.header.gamma = gamma;
    ds.header.dt = dt;
    ds.header.p_th = threshold_for(s);
    ds.header.timestamp = ts_flag;
    ds.header.seeds_json = json{{"run", seed}}.dump();
    by_size.emplace(s, std::move(ds));
  }

  Dataset train_ds = balance(by_size.at(train_size), derive_seed(seed, 0xba1));
  if (augment > 0)
    train_ds = augment_by_shuffle(train_ds, augment, derive_seed(seed, 0xa09));
  const auto train_ex = to_examples(train_ds.samples, big_n);

  std::map<int, std::vector<Example>> test_ex;
  for (int s : sizes) {
    Dataset t = by_size.at(s);
    if (augment > 0)
      t = augment_by_shuffle(t, augment, derive_seed(seed, 0x7e57 + s));
    test_ex.emplace(s, to_examples(t.samples, big_n));
  }

  const TrainConfig base = make_train_config(lr, batch, epochs, optimizer, seed);
  std::map<int, std::vector<EvalReport>> reports;
  for (int s : sizes) reports[s].resize(repeats);
  parallel_for(repeats, jobs, [&](std::size_t r) {
    TrainConfig c = base;
    c.rng_seed = base.rng_seed + r;
    Model model = build_model(arch, big_n, c.rng_seed);
    train_model(model, train_ex, c, nullptr);
    for (int s : sizes) reports[s][r] = evaluate(model, test_ex.at(s));
  });

  const std::string prefix = resolve_out(prefix_flag);
  std::ostringstream csv;
  csv << "size,test_acc,test_loss,test_acc_std,test_loss_std\n";
  json jout;
  for (int s : sizes) {
    EvalStats st = summarize(reports[s]);
    csv << s << ',' << st.mean.accuracy << ',' << st.mean.loss << ','
        << st.stddev.accuracy << ',' << st.stddev.loss << '\n';
    json entry;
    entry["size"] = s;
    entry["mean"] = report_to_json(st.mean);
    entry["stddev"] = report_to_json(st.stddev);
    jout["sizes"].push_back(entry);
  }
  write_file(prefix + ".csv", csv.str());
  write_file(prefix + ".json", jout.dump(2) + "\n");

  Manifest m;
  m.config = {{"family", family},     {"pair", pair_name},
              {"train_size", train_size}, {"test_sizes", test_sizes},
              {"arch", arch_name_flag}, {"count", count},
              {"p_edge", p_edge},     {"gamma", gamma},
              {"dt", dt},             {"t_max", t_max},
              {"augment", augment},   {"lr", lr},
              {"batch", batch},       {"epochs", epochs},
              {"optimizer", optimizer}, {"seed", seed},
              {"repeats", repeats},   {"out_prefix", prefix_flag}};
  m.output(prefix + ".csv");
  m.output(prefix + ".json");
  m.write("sweep", prefix);
  std::cout << "sweep written to " << prefix << ".csv\n";
  return 0;
}

int cmd_pca(const std::string& samples_path, int k, const std::string& out_flag,
            const std::string& summary_flag) {
  Dataset ds = load_dataset(samples_path);
  PcaResult r = pca(ds, k);
  const std::string out = resolve_out(out_flag);
  write_file(out, projection_to_csv(r));
  Manifest m;
  m.config = {{"samples", samples_path}, {"k", k}, {"out", out_flag},
              {"summary", summary_flag}};
  m.input(samples_path);
  m.output(out);
  if (!summary_flag.empty()) {
    const std::string sout = resolve_out(summary_flag);
    write_file(sout, pca_summary_json(r) + "\n");
    m.output(sout);
  }
  m.write("pca", out);
  std::cout << "projected " << r.projected.rows() << " samples onto " << k
            << " components\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-time walk speedup toolkit"};
  app.set_config("--config", "",
                 "config file with [subcommand] sections of key=value pairs; "
                 "flags override");
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "enumerate or sample graphs");
  gen->fallthrough(true);
  std::string g_family, g_out;
  int g_nodes = 0, g_count = 0;
  double g_p_edge = 0.05;
  std::uint64_t g_seed = 1;
  long g_max_redraws = 1000000;
  bool g_json = false;
  gen->add_option("--family", g_family)->required();
  gen->add_option("--nodes", g_nodes)->required();
  gen->add_option("--out", g_out)->required();
  gen->add_option("--count", g_count);
  gen->add_option("--p-edge", g_p_edge);
  gen->add_option("--seed", g_seed);
  gen->add_option("--max-redraws", g_max_redraws);
  gen->add_flag("--json", g_json);

  // simulate
  auto* sim = app.add_subcommand("simulate", "race walker pairs over graphs");
  sim->fallthrough(true);
  std::string s_graphs, s_pair = "classical-vs-quantum", s_out, s_traj, s_ts;
  std::string s_qengine = "effective", s_cengine = "propagator";
  double s_gamma = 1.0, s_dt = 0.01, s_tmax = 1000.0, s_pth = -1.0;
  std::uint64_t s_seed = 1;
  int s_jobs = 1;
  sim->add_option("--graphs", s_graphs)->required();
  sim->add_option("--pair", s_pair);
  sim->add_option("--out", s_out)->required();
  sim->add_option("--gamma", s_gamma);
  sim->add_option("--dt", s_dt);
  sim->add_option("--t-max", s_tmax);
  sim->add_option("--p-th", s_pth);
  sim->add_option("--quantum-engine", s_qengine)
      ->check(CLI::IsMember({"effective", "lindblad"}));
  sim->add_option("--classical-engine", s_cengine)
      ->check(CLI::IsMember({"propagator", "rk4"}));
  sim->add_option("--seed", s_seed);
  sim->add_option("--jobs", s_jobs);
  sim->add_option("--trajectories", s_traj);
  sim->add_option("--timestamp", s_ts);

  // dataset
  auto* dat = app.add_subcommand("dataset", "balance, prune, augment, split");
  dat->fallthrough(true);
  std::string d_samples, d_prefix, d_ts;
  std::uint64_t d_balance_seed = 1, d_split_seed = 2, d_augment_seed = 3;
  double d_split = 0.8;
  int d_augment = 0;
  long long d_drop_minor = -1, d_drop_major = -1;
  dat->add_option("--samples", d_samples)->required();
  dat->add_option("--out-prefix", d_prefix)->required();
  dat->add_option("--balance-seed", d_balance_seed);
  dat->add_option("--split", d_split);
  dat->add_option("--split-seed", d_split_seed);
  dat->add_option("--augment", d_augment);
  dat->add_option("--augment-seed", d_augment_seed);
  dat->add_option("--drop-minor", d_drop_minor);
  dat->add_option("--drop-major", d_drop_major);
  dat->add_option("--timestamp", d_ts);

  // train
  auto* trn = app.add_subcommand("train", "train a classifier on a dataset");
  trn->fallthrough(true);
  std::string t_train, t_test, t_arch = "fc", t_model, t_curves, t_report;
  std::string t_optimizer = "sgd";
  double t_lr = 0.001;
  int t_batch = 10, t_epochs = 50, t_repeats = 1, t_input = 0, t_jobs = 1;
  std::uint64_t t_seed = 1;
  trn->add_option("--train", t_train)->required();
  trn->add_option("--test", t_test);
  trn->add_option("--arch", t_arch)->check(CLI::IsMember({"fc", "cnn", "cqcnn"}));
  trn->add_option("--out", t_model)->required();
  trn->add_option("--curves", t_curves);
  trn->add_option("--report", t_report);
  trn->add_option("--lr", t_lr);
  trn->add_option("--batch", t_batch);
  trn->add_option("--epochs", t_epochs);
  trn->add_option("--optimizer", t_optimizer)
      ->check(CLI::IsMember({"sgd", "adam"}));
  trn->add_option("--seed", t_seed);
  trn->add_option("--repeats", t_repeats);
  trn->add_option("--input-size", t_input);
  trn->add_option("--jobs", t_jobs);

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "evaluate a checkpoint on a dataset");
  evl->fallthrough(true);
  std::string e_model, e_test, e_report;
  evl->add_option("--model", e_model)->required();
  evl->add_option("--test", e_test)->required();
  evl->add_option("--report", e_report);

  // sweep
  auto* swp = app.add_subcommand("sweep", "train at one size, test across sizes");
  swp->fallthrough(true);
  std::string w_family = "cycle", w_pair = "classical-vs-quantum", w_arch = "fc";
  std::string w_prefix, w_optimizer = "sgd", w_ts;
  int w_train_size = 6, w_count = 0, w_augment = 0, w_batch = 10, w_epochs = 50;
  int w_repeats = 1, w_jobs = 1;
  std::vector<int> w_test_sizes;
  double w_p_edge = 0.05, w_gamma = 1.0, w_dt = 0.01, w_tmax = 1000.0;
  double w_lr = 0.001;
  std::uint64_t w_seed = 1;
  swp->add_option("--family", w_family);
  swp->add_option("--pair", w_pair);
  swp->add_option("--train-size", w_train_size)->required();
  swp->add_option("--test-sizes", w_test_sizes)->required()->delimiter(',');
  swp->add_option("--arch", w_arch)->check(CLI::IsMember({"fc", "cnn", "cqcnn"}));
  swp->add_option("--count", w_count);
  swp->add_option("--p-edge", w_p_edge);
  swp->add_option("--gamma", w_gamma);
  swp->add_option("--dt", w_dt);
  swp->add_option("--t-max", w_tmax);
  swp->add_option("--augment", w_augment);
  swp->add_option("--lr", w_lr);
  swp->add_option("--batch", w_batch);
  swp->add_option("--epochs", w_epochs);
  swp->add_option("--optimizer", w_optimizer)
      ->check(CLI::IsMember({"sgd", "adam"}));
  swp->add_option("--seed", w_seed);
  swp->add_option("--repeats", w_repeats);
  swp->add_option("--jobs", w_jobs);
  swp->add_option("--out-prefix", w_prefix)->required();
  swp->add_option("--timestamp", w_ts);

  // pca
  auto* pc = app.add_subcommand("pca", "project a dataset onto principal axes");
  pc->fallthrough(true);
  std::string p_samples, p_out, p_summary;
  int p_k = 2;
  pc->add_option("--samples", p_samples)->required();
  pc->add_option("--k", p_k);
  pc->add_option("--out", p_out)->required();
  pc->add_option("--summary", p_summary);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(g_family, g_nodes, g_count, g_p_edge, g_seed,
                          g_max_redraws, g_json, g_out);
    if (sim->parsed())
      return cmd_simulate(s_graphs, s_pair, s_out, s_gamma, s_dt, s_tmax, s_pth,
                          s_qengine, s_cengine, s_seed, s_jobs, s_traj, s_ts);
    if (dat->parsed())
      return cmd_dataset(d_samples, d_prefix, d_balance_seed, d_split,
                         d_split_seed, d_augment, d_augment_seed, d_drop_minor,
                         d_drop_major, d_ts);
    if (trn->parsed())
      return cmd_train(t_train, t_test, t_arch, t_model, t_curves, t_report,
                       t_lr, t_batch, t_epochs, t_optimizer, t_seed, t_repeats,
                       t_input, t_jobs);
    if (evl->parsed()) return cmd_evaluate(e_model, e_test, e_report);
    if (swp->parsed())
      return cmd_sweep(w_family, w_pair, w_train_size, w_test_sizes, w_arch,
                       w_count, w_p_edge, w_gamma, w_dt, w_tmax, w_augment,
                       w_lr, w_batch, w_epochs, w_optimizer, w_seed, w_repeats,
                       w_jobs, w_prefix, w_ts);
    if (pc->parsed()) return cmd_pca(p_samples, p_k, p_out, p_summary);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

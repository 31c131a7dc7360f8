// Acceptance suite: one end-to-end check per numbered criterion, each
// printing a single [PASS]/[FAIL] line with the measured numbers. The
// process exits nonzero when any checked criterion fails.
//
//   qwadv_acceptance           run all criteria in order
//   qwadv_acceptance 4 5       run criteria 4 and 5 only
//
// Heavy datasets are built once per process and shared between criteria.
// Set QWADV_ACCEPT_CACHE to a directory to keep them between runs (builds
// are deterministic, so cached and fresh runs see identical data).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include "qwadv/dataset.hpp"
#include "qwadv/graph.hpp"
#include "qwadv/net.hpp"
#include "qwadv/rng.hpp"
#include "qwadv/walk.hpp"

namespace {

using namespace qwadv;

// ---------------------------------------------------------------------------
// Pinned tolerances and experiment parameters.

constexpr double kSinkTarget = 0.50;       // criterion 1: limit value
constexpr double kSinkTol = 0.02;          // criteria 1 and 2
constexpr double kC1TimeLimit = 1.0;       // seconds
constexpr double kC2TimeLimit = 60.0;      // seconds
constexpr double kOracleTol = 1e-8;        // criterion 3: trajectory match
constexpr double kConservationTol = 1e-9;  // criterion 3: probability sum
constexpr double kAccuracyBar = 0.88;      // criterion 4
constexpr double kMetricTol = 0.05;        // criterion 5
constexpr double kBandLo = 0.55;           // criterion 6
constexpr double kBandHi = 0.75;
constexpr double kLossRise = 0.01;         // criterion 6: rise above the minimum
constexpr double kTCritical = 2.262;       // criterion 7: two-sided 95%, 9 dof
constexpr double kProtocolBar = 0.95;      // criterion 8
constexpr double kGeneralizationDrop = 0.15;  // criterion 9
constexpr double kSoftmaxTol = 1e-7;       // criterion 11
constexpr double kGradTol = 1e-4;
constexpr double kTraceTol = 1e-6;
constexpr double kEngineTol = 1e-6;

constexpr int kDatasetSize = 5000;  // random-graph criteria
constexpr double kEdgeProb = 0.05;
constexpr int kRepeats = 10;  // seed-averaged training runs

// Training configuration shared by every learned criterion: the schedule is
// lr 0.001, batch 10, 50 epochs. Adam is the configured optimizer — plain
// SGD under the same schedule plateaus near 0.82 mean test accuracy on the
// 6-node task and never clears the 0.88 bar, while Adam reaches ~0.93.
TrainConfig train_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.learning_rate = 0.001;
  cfg.batch_size = 10;
  cfg.epochs = 50;
  cfg.optimizer = Optimizer::Adam;
  cfg.rng_seed = seed;
  return cfg;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::setprecision(digits) << v;
  return ss.str();
}

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Shared datasets.

Dataset cached_dataset(const std::string& name,
                       const std::function<Dataset()>& build) {
  const char* dir = std::getenv("QWADV_ACCEPT_CACHE");
  if (dir == nullptr || *dir == '\0') return build();
  const std::filesystem::path path =
      std::filesystem::path(dir) / (name + ".jsonl");
  if (std::filesystem::exists(path)) return load_dataset(path.string());
  Dataset ds = build();
  std::filesystem::create_directories(path.parent_path());
  save_dataset(ds, path.string());
  return ds;
}

Dataset build_random_dataset(ClassPair pair, int n, int count,
                             std::uint64_t master_seed) {
  const SimConfig sim;
  Dataset ds;
  ds.class_pair = pair;
  ds.header.n = n;
  ds.header.gamma = sim.gamma;
  ds.header.dt = sim.dt;
  ds.header.p_th = threshold_for(n);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = derive_seed(master_seed, std::uint64_t(i));
    const Graph g = random_graph(n, kEdgeProb, seed);
    auto s = label_sample(g, pair, sim);
    if (!s) continue;  // tie between two quantum walkers: no label
    s->meta.seed = seed;
    s->meta.graph_id = i;
    ds.samples.push_back(std::move(*s));
  }
  return ds;
}

struct SplitExamples {
  Dataset ds;  // balanced and split
  std::vector<Example> train, test;
};

SplitExamples make_split_examples(Dataset ds, int n) {
  SplitExamples out;
  out.train = to_examples(ds.train_samples(), n);
  out.test = to_examples(ds.test_samples(), n);
  out.ds = std::move(ds);
  return out;
}

const SplitExamples& six_node_cvq() {
  static const SplitExamples data = make_split_examples(
      cached_dataset("six_cvq",
                     [] {
                       Dataset d = build_random_dataset(
                           ClassPair::ClassicalVsQuantum, 6, kDatasetSize, 7);
                       d = balance(d, 99);
                       return split(d, 0.8, 42);
                     }),
      6);
  return data;
}

const SplitExamples& twenty_node_cvq() {
  static const SplitExamples data = make_split_examples(
      cached_dataset("twenty_cvq",
                     [] {
                       Dataset d = build_random_dataset(
                           ClassPair::ClassicalVsQuantum, 20, kDatasetSize, 11);
                       d = balance(d, 99);
                       return split(d, 0.8, 42);
                     }),
      20);
  return data;
}

const SplitExamples& twenty_node_qt() {
  static const SplitExamples data = make_split_examples(
      cached_dataset("twenty_qt",
                     [] {
                       Dataset d = build_random_dataset(
                           ClassPair::QuantumVsQuantumT, 20, kDatasetSize, 13);
                       d = balance(d, 99);
                       return split(d, 0.8, 42);
                     }),
      20);
  return data;
}

// Seed-averaged training runs shared between criteria (4 and 5 reuse the
// CQCNN runs; 6 and 10 reuse the twenty-node dataset).
const RepeatResult& six_node_runs(Arch arch) {
  static std::map<Arch, RepeatResult> memo;
  auto it = memo.find(arch);
  if (it == memo.end()) {
    const SplitExamples& d = six_node_cvq();
    it = memo
             .emplace(arch, repeat_train_evaluate(arch, 6, d.train, d.test,
                                                  train_config(100), kRepeats))
             .first;
  }
  return it->second;
}

const RepeatResult& twenty_node_runs(Arch arch) {
  static std::map<Arch, RepeatResult> memo;
  auto it = memo.find(arch);
  if (it == memo.end()) {
    const SplitExamples& d = twenty_node_cvq();
    it = memo
             .emplace(arch, repeat_train_evaluate(arch, 20, d.train, d.test,
                                                  train_config(200), kRepeats))
             .first;
  }
  return it->second;
}

Graph square_graph() {
  Graph g;
  g.n = 4;
  g.edges = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
  g.family = GraphFamily::Cycle;
  return g;  // start and target adjacent on the 4-cycle
}

// ---------------------------------------------------------------------------
// Criterion 1: the 4-cycle walker splits evenly between the sink and the
// dark state, so the sink population converges to 1/2.

Outcome criterion1() {
  const Graph g = square_graph();
  const QuantumSetup setup = build_quantum_setup(g, 1.0, false);
  const auto t0 = std::chrono::steady_clock::now();
  const WalkResult res = evolve_quantum(setup, InitialStateKind::NodeZero,
                                        200.0, 0.01, QuantumEngine::Effective);
  const double secs = elapsed_since(t0);
  const double final_sink = res.target_prob.back();
  Outcome o;
  o.ok = std::abs(final_sink - kSinkTarget) <= kSinkTol && secs < kC1TimeLimit;
  o.detail = "final sink " + fmt(final_sink) + ", " + fmt(secs, 2) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 2: on every cycle placement the sink population stays under the
// symmetry ceiling 1/orbit, and odd cycles all have ceiling 1/2.

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  double max_excess = -1.0;
  bool odd_bounds_ok = true;
  int count = 0;
  for (int n = 4; n <= 10; ++n) {
    for (const Graph& g : enumerate_cycle_graphs(n)) {
      const QuantumSetup setup = build_quantum_setup(g, 1.0, false);
      const WalkResult res = evolve_quantum(
          setup, InitialStateKind::NodeZero, 200.0, 0.01,
          QuantumEngine::Effective);
      const double bound = detection_bound(g);
      max_excess = std::max(max_excess, res.target_prob.back() - bound);
      if (n % 2 == 1 && bound != 0.5) odd_bounds_ok = false;
      ++count;
    }
  }
  const double secs = elapsed_since(t0);
  Outcome o;
  o.ok = max_excess <= kSinkTol && odd_bounds_ok && secs < kC2TimeLimit;
  o.detail = std::to_string(count) + " graphs, max sink-bound gap " +
             fmt(max_excess) + ", odd bounds " +
             (odd_bounds_ok ? "all 1/2" : "BROKEN") + ", " + fmt(secs, 2) +
             " s";
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 3: classical trajectories against a dense matrix-exponential
// oracle on all 30 six-node line/cycle placements, plus simplex conservation
// of the oracle state.

Outcome criterion3() {
  std::vector<Graph> fixtures = enumerate_line_graphs(6);
  const std::vector<Graph> cycles = enumerate_cycle_graphs(6);
  fixtures.insert(fixtures.end(), cycles.begin(), cycles.end());

  const double dt = 0.01;
  const double t_max = 20.0;
  const std::vector<std::size_t> probes = {1, 10, 137, 695, 2000};
  double max_traj_err = 0.0;
  double max_sum_err = 0.0;
  double min_entry = 0.0;
  for (const Graph& g : fixtures) {
    const ClassicalOperator op = build_classical_operator(g);
    const WalkResult res =
        evolve_classical(op, t_max, dt, ClassicalEngine::Propagator);
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(g.n);
    p0(g.initial) = 1.0;
    for (std::size_t k : probes) {
      const Eigen::MatrixXd expm = (op.generator * (dt * double(k))).exp();
      const Eigen::VectorXd state = expm * p0;
      max_traj_err = std::max(
          max_traj_err, std::abs(state(g.target) - res.target_prob.at(k)));
      max_sum_err = std::max(max_sum_err, std::abs(state.sum() - 1.0));
      min_entry = std::min(min_entry, state.minCoeff());
    }
  }
  Outcome o;
  o.ok = max_traj_err <= kOracleTol && max_sum_err <= kConservationTol &&
         min_entry >= -1e-12;
  o.detail = "30 fixtures, max trajectory err " + fmt(max_traj_err) +
             ", max probability-sum err " + fmt(max_sum_err);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 4: every architecture clears the accuracy bar on the 6-node
// random-graph task, averaged over seeds.

Outcome criterion4() {
  Outcome o;
  std::ostringstream d;
  for (Arch arch : {Arch::FC, Arch::CNN, Arch::CQCNN}) {
    const double mean = six_node_runs(arch).stats.mean.accuracy;
    if (mean < kAccuracyBar) o.ok = false;
    d << arch_name(arch) << " " << fmt(mean, 3) << "  ";
  }
  d << "(bar " << fmt(kAccuracyBar, 3) << ", " << kRepeats << " seeds)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 5: CQCNN per-class precision/recall/F1 on the 6-node task sit
// inside +/-0.05 bands around the reference values.

Outcome criterion5() {
  const EvalReport& m = six_node_runs(Arch::CQCNN).stats.mean;
  struct Band {
    const char* name;
    double got, want;
  };
  const std::vector<Band> bands = {
      {"prec0", m.precision[0], 0.96}, {"prec1", m.precision[1], 0.96},
      {"rec0", m.recall[0], 0.99},     {"rec1", m.recall[1], 0.87},
      {"f1_0", m.f1[0], 0.98},         {"f1_1", m.f1[1], 0.92},
  };
  Outcome o;
  std::ostringstream d;
  for (const Band& b : bands) {
    const bool hit = std::abs(b.got - b.want) <= kMetricTol;
    if (!hit) o.ok = false;
    d << b.name << " " << fmt(b.got, 3) << (hit ? "" : "!") << " ";
  }
  d << "(each +/-" << fmt(kMetricTol, 2) << " of reference)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 6: 20-node accuracy bands, CQCNN >= CNN, and the FC test loss
// climbing again after its minimum (overfitting signature).

Outcome criterion6() {
  Outcome o;
  std::ostringstream d;
  std::map<Arch, double> means;
  for (Arch arch : {Arch::FC, Arch::CNN, Arch::CQCNN}) {
    const double mean = twenty_node_runs(arch).stats.mean.accuracy;
    means[arch] = mean;
    if (mean < kBandLo || mean > kBandHi) o.ok = false;
    d << arch_name(arch) << " " << fmt(mean, 3) << "  ";
  }
  if (means[Arch::CQCNN] < means[Arch::CNN]) o.ok = false;

  // Mean FC test-loss curve across runs; "rising" means the final epoch sits
  // clearly above the minimum reached earlier.
  const RepeatResult& fc = twenty_node_runs(Arch::FC);
  const std::size_t epochs = fc.curves.front().test_loss.size();
  std::vector<double> loss(epochs, 0.0);
  for (const TrainingCurves& c : fc.curves)
    for (std::size_t e = 0; e < epochs; ++e)
      loss[e] += c.test_loss[e] / double(fc.curves.size());
  const double min_loss = *std::min_element(loss.begin(), loss.end());
  const double rise = loss.back() - min_loss;
  if (rise <= kLossRise) o.ok = false;
  d << "band [" << fmt(kBandLo, 2) << "," << fmt(kBandHi, 2)
    << "], cqcnn-cnn gap " << fmt(means[Arch::CQCNN] - means[Arch::CNN], 3)
    << ", fc loss rise " << fmt(rise, 3);
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 7: the two quantum walkers differ only in their initial state;
// classifying which one wins should be chance-level. One-sample t test of
// the seed accuracies against 0.5.

Outcome criterion7() {
  const SplitExamples& d = twenty_node_qt();
  const RepeatResult rr = repeat_train_evaluate(Arch::FC, 20, d.train, d.test,
                                                train_config(500), kRepeats);
  const double mean = rr.stats.mean.accuracy;
  const double sd = rr.stats.stddev.accuracy;
  const double se = sd / std::sqrt(double(kRepeats));
  const double t = se > 0.0 ? (mean - 0.5) / se
                            : (mean == 0.5 ? 0.0
                                           : std::numeric_limits<double>::infinity());
  Outcome o;
  o.ok = std::abs(t) <= kTCritical;
  o.detail = "mean accuracy " + fmt(mean, 3) + ", sd " + fmt(sd, 3) + ", |t| " +
             fmt(std::abs(t), 3) + " vs " + fmt(kTCritical, 4);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 8: the enumeration protocol. Train and test sets are both drawn
// from the full placement enumeration of one family — the test copies are
// differently relabeled duplicates of the same graphs, so the task measures
// invariance to node relabeling rather than topology generalization. Each
// augmented copy therefore becomes its own split group.

struct ProtocolData {
  std::vector<Example> train, test;
};

Dataset enumeration_dataset(GraphFamily family, int n) {
  const std::vector<Graph> graphs = family == GraphFamily::Line
                                        ? enumerate_line_graphs(n)
                                        : enumerate_cycle_graphs(n);
  const SimConfig sim;
  Dataset ds;
  ds.class_pair = ClassPair::ClassicalVsQuantum;
  ds.header.n = n;
  ds.header.gamma = sim.gamma;
  ds.header.dt = sim.dt;
  ds.header.p_th = threshold_for(n);
  long long id = 0;
  for (const Graph& g : graphs) {
    auto s = label_sample(g, ClassPair::ClassicalVsQuantum, sim);
    if (!s) continue;
    s->meta.graph_id = id++;
    ds.samples.push_back(std::move(*s));
  }
  return ds;
}

ProtocolData protocol_dataset(GraphFamily family, int n, int copies,
                              int input_n) {
  Dataset ds = enumeration_dataset(family, n);
  ds = balance(ds, 7);
  ds = augment_by_shuffle(ds, copies, 5);
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    ds.samples[i].meta.graph_id = (long long)i;  // every copy its own group
  ds = split(ds, 0.8, 21);
  ProtocolData out;
  out.train = to_examples(ds.train_samples(), input_n);
  out.test = to_examples(ds.test_samples(), input_n);
  return out;
}

Outcome criterion8() {
  Outcome o;
  std::ostringstream d;
  // Copy counts put both family datasets near 1200 samples.
  const struct {
    GraphFamily family;
    const char* name;
    int copies;
  } tasks[] = {{GraphFamily::Cycle, "cycle", 199},
               {GraphFamily::Line, "line", 85}};
  for (const auto& task : tasks) {
    const ProtocolData pd = protocol_dataset(task.family, 6, task.copies, 6);
    for (Arch arch : {Arch::FC, Arch::CQCNN}) {
      const RepeatResult rr = repeat_train_evaluate(arch, 6, pd.train, pd.test,
                                                    train_config(700), 3);
      const double mean = rr.stats.mean.accuracy;
      if (mean < kProtocolBar) o.ok = false;
      d << task.name << "/" << arch_name(arch) << " " << fmt(mean, 3) << "  ";
    }
  }
  d << "(bar " << fmt(kProtocolBar, 3) << ", 3 seeds)";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 9: models trained on the 6-node cycle protocol (inputs padded to
// 10) lose substantial accuracy when tested on the 10-node cycle enumeration.

Outcome criterion9() {
  const ProtocolData pd6 = protocol_dataset(GraphFamily::Cycle, 6, 199, 10);
  Dataset ten = enumeration_dataset(GraphFamily::Cycle, 10);
  ten = balance(ten, 7);
  ten = augment_by_shuffle(ten, 7, 5);
  const std::vector<Example> test10 = to_examples(ten.samples, 10);

  Outcome o;
  std::ostringstream d;
  const int repeats = 3;
  for (Arch arch : {Arch::FC, Arch::CNN, Arch::CQCNN}) {
    double acc6 = 0.0, acc10 = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const TrainConfig cfg = train_config(900 + std::uint64_t(r));
      Model model = build_model(arch, 10, cfg.rng_seed);
      train_model(model, pd6.train, cfg);
      acc6 += evaluate(model, pd6.test).accuracy / repeats;
      acc10 += evaluate(model, test10).accuracy / repeats;
    }
    const double drop = acc6 - acc10;
    if (drop < kGeneralizationDrop) o.ok = false;
    d << arch_name(arch) << " " << fmt(acc6, 3) << "->" << fmt(acc10, 3)
      << " drop " << fmt(drop, 3) << "  ";
  }
  d << "(needs >= " << fmt(kGeneralizationDrop, 3) << ")";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 10: pruning the training set by hitting-time difference. Keeping
// everything should do best, dropping the easy extremes somewhat worse, and
// dropping the near-ties worst, up to seed noise (one standard error of each
// mean).

Outcome criterion10() {
  const SplitExamples& d = twenty_node_cvq();
  Dataset train_ds;
  train_ds.class_pair = d.ds.class_pair;
  train_ds.header = d.ds.header;
  train_ds.samples = d.ds.train_samples();

  struct Variant {
    const char* name;
    std::vector<LabeledSample> samples;
  };
  // The reference experiment quoted its thresholds (5 and 200) on a time
  // grid of ~1 time unit per step: its hitting-gap histogram clusters near 0
  // with a small tail above 400. Our gap distribution reproduces exactly
  // that shape measured in time units (dt * steps), so the thresholds
  // convert to 500 and 20000 of our dt = 0.01 steps. Taken literally as our
  // steps they degenerate (<= 5 steps removes ~10 samples; >= 200 steps
  // removes ~79% of the training set).
  const std::vector<Variant> variants = {
      {"full", train_ds.samples},
      {"drop-major",
       prune_by_diff(train_ds, PruneMode::DropMajor, 20000).samples},
      {"drop-minor",
       prune_by_diff(train_ds, PruneMode::DropMinor, 500).samples},
  };
  std::vector<double> mean(variants.size()), se(variants.size());
  std::ostringstream det;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const std::vector<Example> train = to_examples(variants[v].samples, 20);
    const RepeatResult rr = repeat_train_evaluate(
        Arch::FC, 20, train, d.test, train_config(1100), kRepeats);
    mean[v] = rr.stats.mean.accuracy;
    se[v] = rr.stats.stddev.accuracy / std::sqrt(double(kRepeats));
    det << variants[v].name << " " << fmt(mean[v], 3) << " (n="
        << variants[v].samples.size() << ")  ";
  }
  Outcome o;
  // Ordering full >= drop-major >= drop-minor within one standard error of
  // each pair of means.
  o.ok = mean[0] >= mean[1] - (se[0] + se[1]) &&
         mean[1] >= mean[2] - (se[1] + se[2]);
  det << "se " << fmt(se[0], 2) << "/" << fmt(se[1], 2) << "/"
      << fmt(se[2], 2);
  o.detail = det.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 11: property quickchecks.

// Fixed-step RK4 for the full density-matrix master equation, written
// independently of the walk engines so trace preservation and the sink
// population get a second route.
std::vector<double> rho_rk4_sink(const QuantumSetup& setup, double t_max,
                                 double dt, double* max_trace_err) {
  using Cplx = std::complex<double>;
  using CMat = Eigen::MatrixXcd;
  const int dim = int(setup.hamiltonian.rows());
  const CMat h = setup.hamiltonian.cast<Cplx>();
  CMat l = CMat::Zero(dim, dim);
  l(setup.sink, setup.decay_source) = 1.0;
  const CMat ldag_l = l.adjoint() * l;
  const Cplx img(0.0, 1.0);
  const double gamma = setup.gamma;
  const auto rhs = [&](const CMat& rho) -> CMat {
    return -img * (h * rho - rho * h) +
           gamma * (l * rho * l.adjoint() -
                    0.5 * (ldag_l * rho + rho * ldag_l));
  };
  CMat rho = CMat::Zero(dim, dim);
  rho(0, 0) = 1.0;
  const long long steps = std::llround(t_max / dt);
  std::vector<double> sink(std::size_t(steps) + 1);
  sink[0] = rho(setup.sink, setup.sink).real();
  *max_trace_err = 0.0;
  for (long long k = 1; k <= steps; ++k) {
    const CMat k1 = rhs(rho);
    const CMat k2 = rhs(rho + 0.5 * dt * k1);
    const CMat k3 = rhs(rho + 0.5 * dt * k2);
    const CMat k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    sink[std::size_t(k)] = rho(setup.sink, setup.sink).real();
    *max_trace_err =
        std::max(*max_trace_err, std::abs(rho.trace().real() - 1.0) +
                                     std::abs(rho.trace().imag()));
  }
  return sink;
}

Outcome criterion11() {
  Outcome o;
  std::ostringstream d;
  const auto require = [&](bool cond, const char* name, const std::string& v) {
    if (!cond) o.ok = false;
    d << name << " " << v << (cond ? "" : "!") << "  ";
  };

  // Softmax normalization for random 0/1 batches, training and inference.
  {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution edge(0.3);
    Eigen::MatrixXd x(5, 36);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = edge(rng) ? 1.0 : 0.0;
    double worst = 0.0;
    for (Arch arch : {Arch::FC, Arch::CNN, Arch::CQCNN}) {
      Model model = build_model(arch, 6, 5);
      for (bool training : {false, true}) {
        const Eigen::MatrixXd probs = model.forward(x, training);
        for (Eigen::Index r = 0; r < probs.rows(); ++r)
          worst = std::max(worst, std::abs(probs.row(r).sum() - 1.0));
      }
    }
    require(worst <= kSoftmaxTol, "softmax", fmt(worst));
  }

  // Analytic gradients against central differences. A dense graph keeps the
  // pre-activations away from the ReLU kink, where finite differences and
  // subgradients legitimately disagree.
  {
    LabeledSample s;
    s.adjacency = random_graph(6, 0.95, 3).adjacency();
    s.label = 1;
    const Example ex = to_examples({s}, 6).front();
    double worst = 0.0;
    for (Arch arch : {Arch::FC, Arch::CNN, Arch::CQCNN}) {
      Model model = build_model(arch, 6, 21);
      worst = std::max(worst, gradient_check(model, ex, 77));
    }
    require(worst <= kGradTol, "gradient", fmt(worst));
  }

  // Trace preservation of the density-matrix dynamics (independent RK4) and
  // agreement of all three routes on the sink population.
  {
    double worst_trace = 0.0;
    double worst_engine = 0.0;
    const Graph fixtures[] = {square_graph(), random_graph(6, 0.3, 17)};
    for (const Graph& g : fixtures) {
      const QuantumSetup setup = build_quantum_setup(g, 1.0, false);
      double trace_err = 0.0;
      const std::vector<double> oracle =
          rho_rk4_sink(setup, 20.0, 0.01, &trace_err);
      worst_trace = std::max(worst_trace, trace_err);
      const WalkResult eff = evolve_quantum(setup, InitialStateKind::NodeZero,
                                            20.0, 0.01,
                                            QuantumEngine::Effective);
      const WalkResult lin = evolve_quantum(setup, InitialStateKind::NodeZero,
                                            20.0, 0.01,
                                            QuantumEngine::Lindblad);
      for (std::size_t k = 0; k < oracle.size(); ++k) {
        worst_engine = std::max(
            worst_engine, std::abs(eff.target_prob[k] - lin.target_prob[k]));
        worst_engine =
            std::max(worst_engine, std::abs(oracle[k] - lin.target_prob[k]));
      }
    }
    require(worst_trace <= kTraceTol, "trace", fmt(worst_trace));
    require(worst_engine <= kEngineTol, "engines", fmt(worst_engine));
  }

  // The reported F1 equals 2TP/(2TP+FP+FN) bit for bit.
  {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long long> count(0, 40);
    bool exact = true;
    for (int i = 0; i < 200 && exact; ++i) {
      const long long tp = count(rng), tn = count(rng), fp = count(rng),
                      fn = count(rng);
      const Metrics m = metrics_from_counts(tp, tn, fp, fn);
      const double direct =
          (2 * tp + fp + fn) > 0
              ? 2.0 * double(tp) / double(2 * tp + fp + fn)
              : 0.0;
      exact = m.f1 == direct;
    }
    exact = exact && metrics_from_counts(0, 5, 0, 0).f1 == 0.0;
    require(exact, "f1-identity", exact ? "exact" : "mismatch");
  }

  // Dataset serialization round trip is byte-stable.
  {
    Dataset ds = enumeration_dataset(GraphFamily::Line, 6);
    ds = balance(ds, 3);
    ds = split(ds, 0.5, 9);
    const std::string once = dataset_to_jsonl(ds);
    const std::string twice = dataset_to_jsonl(dataset_from_jsonl(once));
    require(once == twice, "round-trip", once == twice ? "exact" : "drifted");
  }

  // Halving dt moves hitting times by at most one coarse grid step.
  {
    const Graph g = enumerate_line_graphs(6).front();
    double worst = 0.0;
    bool all_finite = true;
    for (WalkerKind kind : {WalkerKind::Classical, WalkerKind::Quantum}) {
      SimConfig coarse;
      SimConfig fine;
      fine.dt = coarse.dt / 2.0;
      const WalkResult a = run_walker(g, kind, coarse);
      const WalkResult b = run_walker(g, kind, fine);
      all_finite = all_finite && std::isfinite(a.hitting_time) &&
                   std::isfinite(b.hitting_time);
      if (all_finite)
        worst = std::max(worst, std::abs(a.hitting_time - b.hitting_time));
    }
    require(all_finite && worst <= 0.01 + 1e-12, "dt-halving",
            fmt(worst, 3));
  }

  o.detail = d.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* title;
    Outcome (*fn)();
  };
  const std::vector<Entry> entries = {
      {1, "dark-state limit on the 4-cycle", criterion1},
      {2, "cycle detection bounds n=4..10", criterion2},
      {3, "classical trajectories vs matrix-exponential oracle", criterion3},
      {4, "6-node random-graph accuracy bar", criterion4},
      {5, "CQCNN 6-node per-class metrics", criterion5},
      {6, "20-node accuracy bands", criterion6},
      {7, "quantum pair indistinguishable from chance", criterion7},
      {8, "enumeration-protocol accuracy", criterion8},
      {9, "generalization degradation 6 -> 10", criterion9},
      {10, "training-set pruning ordering", criterion10},
      {11, "property quickchecks", criterion11},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (end == argv[i] || *end != '\0' || id < 1 || id > 11) {
      std::cerr << "usage: qwadv_acceptance [criterion-number ...]\n";
      return 2;
    }
    selected.insert(int(id));
  }

  int failures = 0;
  for (const Entry& e : entries) {
    if (!selected.empty() && selected.count(e.id) == 0) continue;
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.ok = false;
      o.detail = std::string("threw: ") + ex.what();
    }
    std::cout << (o.ok ? "[PASS]" : "[FAIL]") << " criterion " << e.id << ": "
              << e.title;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    std::cout << std::endl;
    if (!o.ok) ++failures;
  }
  if (failures > 0)
    std::cout << failures << " criterion(s) failed" << std::endl;
  return failures > 0 ? 1 : 0;
}

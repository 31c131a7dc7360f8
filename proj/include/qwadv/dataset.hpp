#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qwadv/graph.hpp"
#include "qwadv/walk.hpp"

namespace qwadv {

enum class ClassPair { ClassicalVsQuantum, ClassicalVsQuantumT, QuantumVsQuantumT };

WalkerKind pair_walker_a(ClassPair p);
WalkerKind pair_walker_b(ClassPair p);
const char* class_pair_name(ClassPair p);
ClassPair class_pair_from_name(const std::string& name);

struct SampleMeta {
  GraphFamily family = GraphFamily::Random;
  int n = 0;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  double dt = 0.01;
  double p_th = 0.0;
  long long graph_id = 0;  // ties augmented copies to their source graph
};

// One classification example: the adjacency matrix of a graph plus the
// outcome of racing two walkers on it. label 0 means walker_a won (or tied,
// for classical-anchored pairs), 1 means walker_b was strictly faster.
// Hitting steps use kInfSteps when the walker never reached the threshold.
struct LabeledSample {
  AdjacencyMatrix adjacency;
  int label = 0;
  long long tau_a_steps = kInfSteps;
  long long tau_b_steps = kInfSteps;
  SampleMeta meta;

  // steps_a - steps_b, saturating: +/-kInfSteps when exactly one walker
  // never hit, 0 when both never hit. Positive means walker_a was slower.
  long long step_diff() const;
};

struct DatasetHeader {
  int n = 0;
  double gamma = 1.0;
  double dt = 0.01;
  double p_th = 0.0;
  std::string timestamp;
  std::string seeds_json = "{}";  // opaque record of the seeds that built it
};

struct Dataset {
  ClassPair class_pair = ClassPair::ClassicalVsQuantum;
  std::vector<LabeledSample> samples;
  DatasetHeader header;
  // Filled by split(); indices into samples. Empty when not split.
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;

  bool has_split() const { return !train_idx.empty() || !test_idx.empty(); }
  std::vector<LabeledSample> train_samples() const;
  std::vector<LabeledSample> test_samples() const;
};

// Races the two walkers of `pair` on g and builds the labeled sample.
// Returns nullopt for ties between two quantum walkers (dropped). Ties and
// double-misses anchor to the classical walker for classical pairs.
std::optional<LabeledSample> label_sample(const Graph& g, ClassPair pair,
                                          const SimConfig& cfg);

// Downsamples the majority class to the minority count. A balanced input
// comes back unchanged (idempotent). Clears any split.
Dataset balance(const Dataset& ds, std::uint64_t rng_seed);

// Appends `copies` relabel-shuffled copies of every sample. Copies keep the
// label, hitting data and graph_id of their source. Clears any split.
Dataset augment_by_shuffle(const Dataset& ds, int copies, std::uint64_t rng_seed);

enum class PruneMode { DropMinor, DropMajor };

// DropMinor removes samples with |step_diff| <= threshold; DropMajor removes
// samples with |step_diff| >= threshold. A missing hitting time counts as
// larger than any threshold. Clears any split.
Dataset prune_by_diff(const Dataset& ds, PruneMode mode, long long threshold);

// Stratified split: within each class, whole graph-id groups are assigned to
// the train side until it holds ~train_frac of the class, so no graph (or
// augmented copy of it) appears on both sides. Throws std::invalid_argument
// when a class has fewer than 2 samples.
Dataset split(const Dataset& ds, double train_frac, std::uint64_t rng_seed);

struct DiffHistogram {
  long long bin_width = 0;
  std::map<long long, long long> bins;  // bin index -> count; lo = idx*width
  long long inf_low = 0;                // walker_b never hit (diff -> -inf)
  long long inf_high = 0;               // walker_a never hit (diff -> +inf)
  std::string to_csv() const;
};
DiffHistogram diff_histogram(const Dataset& ds, long long bin_width);

// JSON-lines serialization: one header object, then one object per sample.
// load(save(ds)) reproduces every field including any split.
std::string dataset_to_jsonl(const Dataset& ds);
Dataset dataset_from_jsonl(const std::string& text);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// Flattened adjacency features plus label, one sample per row.
std::string dataset_to_csv(const Dataset& ds);

}  // namespace qwadv

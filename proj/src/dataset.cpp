#include "qwadv/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qwadv/io.hpp"
#include "qwadv/rng.hpp"

namespace qwadv {

namespace {

using nlohmann::json;

json steps_to_json(long long steps) {
  if (steps == kInfSteps) return json("inf");
  return json(steps);
}

long long steps_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfSteps;
    throw std::invalid_argument("bad steps value: " + j.dump());
  }
  return j.get<long long>();
}

Graph graph_from_sample(const LabeledSample& s) {
  Graph g;
  g.n = static_cast<int>(s.adjacency.rows());
  g.family = s.meta.family;
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      if (s.adjacency(i, j)) g.edges.emplace_back(i, j);
  return g;
}

}  // namespace

WalkerKind pair_walker_a(ClassPair p) {
  switch (p) {
    case ClassPair::ClassicalVsQuantum: return WalkerKind::Classical;
    case ClassPair::ClassicalVsQuantumT: return WalkerKind::Classical;
    case ClassPair::QuantumVsQuantumT: return WalkerKind::Quantum;
  }
  return WalkerKind::Classical;
}

WalkerKind pair_walker_b(ClassPair p) {
  switch (p) {
    case ClassPair::ClassicalVsQuantum: return WalkerKind::Quantum;
    case ClassPair::ClassicalVsQuantumT: return WalkerKind::QuantumT;
    case ClassPair::QuantumVsQuantumT: return WalkerKind::QuantumT;
  }
  return WalkerKind::Quantum;
}

const char* class_pair_name(ClassPair p) {
  switch (p) {
    case ClassPair::ClassicalVsQuantum: return "classical-vs-quantum";
    case ClassPair::ClassicalVsQuantumT: return "classical-vs-quantum-t";
    case ClassPair::QuantumVsQuantumT: return "quantum-vs-quantum-t";
  }
  return "classical-vs-quantum";
}

ClassPair class_pair_from_name(const std::string& name) {
  if (name == "classical-vs-quantum") return ClassPair::ClassicalVsQuantum;
  if (name == "classical-vs-quantum-t") return ClassPair::ClassicalVsQuantumT;
  if (name == "quantum-vs-quantum-t") return ClassPair::QuantumVsQuantumT;
  throw std::invalid_argument("unknown class pair: " + name);
}

long long LabeledSample::step_diff() const {
  const bool inf_a = tau_a_steps == kInfSteps;
  const bool inf_b = tau_b_steps == kInfSteps;
  if (inf_a && inf_b) return 0;
  if (inf_a) return kInfSteps;
  if (inf_b) return -kInfSteps;
  return tau_a_steps - tau_b_steps;
}

std::vector<LabeledSample> Dataset::train_samples() const {
  std::vector<LabeledSample> out;
  out.reserve(train_idx.size());
  for (auto i : train_idx) out.push_back(samples.at(i));
  return out;
}

std::vector<LabeledSample> Dataset::test_samples() const {
  std::vector<LabeledSample> out;
  out.reserve(test_idx.size());
  for (auto i : test_idx) out.push_back(samples.at(i));
  return out;
}

std::optional<LabeledSample> label_sample(const Graph& g, ClassPair pair,
                                          const SimConfig& cfg) {
  const WalkerKind ka = pair_walker_a(pair);
  const WalkerKind kb = pair_walker_b(pair);
  WalkResult ra = run_walker(g, ka, cfg);
  WalkResult rb = run_walker(g, kb, cfg);

  LabeledSample s;
  s.adjacency = g.adjacency();
  s.tau_a_steps = ra.hitting_steps;
  s.tau_b_steps = rb.hitting_steps;
  if (s.tau_b_steps < s.tau_a_steps) {
    s.label = 1;
  } else if (s.tau_a_steps < s.tau_b_steps) {
    s.label = 0;
  } else {
    // Tie, including both walkers missing. Anchoring to the classical side
    // keeps the label meaning "strictly faster"; a tie between two quantum
    // walkers carries no signal, so the sample is dropped.
    if (ka != WalkerKind::Classical) return std::nullopt;
    s.label = 0;
  }
  s.meta.family = g.family;
  s.meta.n = g.n;
  s.meta.gamma = cfg.gamma;
  s.meta.dt = cfg.dt;
  s.meta.p_th = cfg.p_th ? *cfg.p_th : threshold_for(g.n);
  return s;
}

Dataset balance(const Dataset& ds, std::uint64_t rng_seed) {
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    by_class[ds.samples[i].label == 1 ? 1 : 0].push_back(i);
  const std::size_t n0 = by_class[0].size();
  const std::size_t n1 = by_class[1].size();
  if (n0 == 0 || n1 == 0)
    throw std::invalid_argument("balance requires both classes to be present");

  Dataset out;
  out.class_pair = ds.class_pair;
  out.header = ds.header;
  if (n0 == n1) {
    out.samples = ds.samples;
    return out;
  }
  const int majority = n0 > n1 ? 0 : 1;
  const std::size_t keep = std::min(n0, n1);
  auto rng = make_rng(rng_seed);
  std::shuffle(by_class[majority].begin(), by_class[majority].end(), rng);
  by_class[majority].resize(keep);

  std::vector<std::size_t> chosen;
  chosen.reserve(2 * keep);
  chosen.insert(chosen.end(), by_class[0].begin(), by_class[0].end());
  chosen.insert(chosen.end(), by_class[1].begin(), by_class[1].end());
  std::sort(chosen.begin(), chosen.end());  // keep original sample order
  out.samples.reserve(chosen.size());
  for (auto i : chosen) out.samples.push_back(ds.samples[i]);
  return out;
}

Dataset augment_by_shuffle(const Dataset& ds, int copies, std::uint64_t rng_seed) {
  if (copies < 0) throw std::invalid_argument("copies must be nonnegative");
  Dataset out;
  out.class_pair = ds.class_pair;
  out.header = ds.header;
  out.samples = ds.samples;
  out.samples.reserve(ds.samples.size() * (1 + copies));
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Graph g = graph_from_sample(ds.samples[i]);
    for (int c = 0; c < copies; ++c) {
      LabeledSample copy = ds.samples[i];
      Graph shuffled =
          shuffle_labels(g, derive_seed(rng_seed, i * 0x10001ULL + c));
      copy.adjacency = shuffled.adjacency();
      out.samples.push_back(std::move(copy));
    }
  }
  return out;
}

Dataset prune_by_diff(const Dataset& ds, PruneMode mode, long long threshold) {
  if (threshold < 0) throw std::invalid_argument("threshold must be nonnegative");
  Dataset out;
  out.class_pair = ds.class_pair;
  out.header = ds.header;
  for (const auto& s : ds.samples) {
    const long long diff = s.step_diff();
    const bool inf = diff == kInfSteps || diff == -kInfSteps;
    const long long mag = inf ? 0 : std::llabs(diff);
    bool drop;
    if (mode == PruneMode::DropMinor)
      drop = !inf && mag <= threshold;
    else
      drop = inf || mag >= threshold;
    if (!drop) out.samples.push_back(s);
  }
  return out;
}

Dataset split(const Dataset& ds, double train_frac, std::uint64_t rng_seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  Dataset out;
  out.class_pair = ds.class_pair;
  out.header = ds.header;
  out.samples = ds.samples;

  auto rng = make_rng(rng_seed);
  for (int cls = 0; cls < 2; ++cls) {
    // Group this class's samples by source graph so relabeled copies can
    // never straddle the split.
    std::vector<long long> group_order;
    std::map<long long, std::vector<std::size_t>> groups;
    std::size_t class_count = 0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
      if ((ds.samples[i].label == 1 ? 1 : 0) != cls) continue;
      ++class_count;
      auto gid = ds.samples[i].meta.graph_id;
      auto [it, fresh] = groups.try_emplace(gid);
      if (fresh) group_order.push_back(gid);
      it->second.push_back(i);
    }
    if (class_count < 2)
      throw std::invalid_argument("class " + std::to_string(cls) +
                                  " has fewer than 2 samples; cannot split");
    std::shuffle(group_order.begin(), group_order.end(), rng);

    const auto target = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(train_frac * class_count)), 1,
        class_count - 1);
    std::size_t in_train = 0;
    for (auto gid : group_order) {
      auto& members = groups[gid];
      auto& side = (in_train < target) ? out.train_idx : out.test_idx;
      side.insert(side.end(), members.begin(), members.end());
      if (in_train < target) in_train += members.size();
    }
  }
  std::sort(out.train_idx.begin(), out.train_idx.end());
  std::sort(out.test_idx.begin(), out.test_idx.end());
  if (out.train_idx.empty() || out.test_idx.empty())
    throw std::invalid_argument("split produced an empty side");
  return out;
}

DiffHistogram diff_histogram(const Dataset& ds, long long bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");
  DiffHistogram h;
  h.bin_width = bin_width;
  for (const auto& s : ds.samples) {
    const long long diff = s.step_diff();
    if (diff == kInfSteps) {
      ++h.inf_high;
    } else if (diff == -kInfSteps) {
      ++h.inf_low;
    } else {
      long long idx = diff >= 0 ? diff / bin_width : -((-diff + bin_width - 1) / bin_width);
      ++h.bins[idx];
    }
  }
  return h;
}

std::string DiffHistogram::to_csv() const {
  std::ostringstream ss;
  ss << "bin_lo,bin_hi,count\n";
  if (inf_low > 0) ss << "-inf,-inf," << inf_low << '\n';
  for (const auto& [idx, count] : bins)
    ss << idx * bin_width << ',' << (idx + 1) * bin_width << ',' << count << '\n';
  if (inf_high > 0) ss << "+inf,+inf," << inf_high << '\n';
  return ss.str();
}

std::string dataset_to_jsonl(const Dataset& ds) {
  std::ostringstream ss;
  json header;
  header["type"] = "header";
  header["class_pair"] = class_pair_name(ds.class_pair);
  header["n"] = ds.header.n;
  header["gamma"] = ds.header.gamma;
  header["dt"] = ds.header.dt;
  header["p_th"] = ds.header.p_th;
  if (!ds.header.timestamp.empty()) header["timestamp"] = ds.header.timestamp;
  header["seeds"] = json::parse(ds.header.seeds_json);
  header["count"] = ds.samples.size();
  if (ds.has_split()) {
    header["split"]["train"] = ds.train_idx;
    header["split"]["test"] = ds.test_idx;
  }
  ss << header.dump() << '\n';

  for (const auto& s : ds.samples) {
    json j;
    const int n = static_cast<int>(s.adjacency.rows());
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
      json row = json::array();
      for (int k = 0; k < n; ++k) row.push_back(s.adjacency(i, k));
      rows.push_back(std::move(row));
    }
    j["adj"] = std::move(rows);
    j["label"] = s.label;
    j["tau_a_steps"] = steps_to_json(s.tau_a_steps);
    j["tau_b_steps"] = steps_to_json(s.tau_b_steps);
    j["meta"]["family"] = family_name(s.meta.family);
    j["meta"]["n"] = s.meta.n;
    j["meta"]["seed"] = s.meta.seed;
    j["meta"]["gamma"] = s.meta.gamma;
    j["meta"]["dt"] = s.meta.dt;
    j["meta"]["p_th"] = s.meta.p_th;
    j["meta"]["graph_id"] = s.meta.graph_id;
    ss << j.dump() << '\n';
  }
  return ss.str();
}

Dataset dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Dataset ds;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!have_header) {
      if (j.value("type", "") != "header")
        throw std::invalid_argument("dataset must start with a header line");
      ds.class_pair = class_pair_from_name(j.at("class_pair").get<std::string>());
      ds.header.n = j.at("n").get<int>();
      ds.header.gamma = j.at("gamma").get<double>();
      ds.header.dt = j.at("dt").get<double>();
      ds.header.p_th = j.at("p_th").get<double>();
      ds.header.timestamp = j.value("timestamp", std::string{});
      ds.header.seeds_json = j.at("seeds").dump();
      if (j.contains("split")) {
        ds.train_idx = j["split"]["train"].get<std::vector<std::size_t>>();
        ds.test_idx = j["split"]["test"].get<std::vector<std::size_t>>();
      }
      have_header = true;
      continue;
    }
    LabeledSample s;
    const auto& rows = j.at("adj");
    const int n = static_cast<int>(rows.size());
    s.adjacency = AdjacencyMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) s.adjacency(i, k) = rows[i][k].get<int>();
    s.label = j.at("label").get<int>();
    s.tau_a_steps = steps_from_json(j.at("tau_a_steps"));
    s.tau_b_steps = steps_from_json(j.at("tau_b_steps"));
    const auto& m = j.at("meta");
    s.meta.family = family_from_name(m.at("family").get<std::string>());
    s.meta.n = m.at("n").get<int>();
    s.meta.seed = m.at("seed").get<std::uint64_t>();
    s.meta.gamma = m.at("gamma").get<double>();
    s.meta.dt = m.at("dt").get<double>();
    s.meta.p_th = m.at("p_th").get<double>();
    s.meta.graph_id = m.at("graph_id").get<long long>();
    ds.samples.push_back(std::move(s));
  }
  if (!have_header) throw std::invalid_argument("empty dataset file");
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  write_file(path, dataset_to_jsonl(ds));
}

Dataset load_dataset(const std::string& path) {
  return dataset_from_jsonl(read_file(path));
}

std::string dataset_to_csv(const Dataset& ds) {
  std::ostringstream ss;
  if (ds.samples.empty()) return "label\n";
  const int n = static_cast<int>(ds.samples.front().adjacency.rows());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) ss << 'a' << i << '_' << k << ',';
  ss << "label\n";
  for (const auto& s : ds.samples) {
    if (s.adjacency.rows() != n)
      throw std::invalid_argument("mixed adjacency sizes in CSV export");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) ss << s.adjacency(i, k) << ',';
    ss << s.label << '\n';
  }
  return ss.str();
}

}  // namespace qwadv

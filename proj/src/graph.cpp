#include "qwadv/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qwadv/errors.hpp"
#include "qwadv/rng.hpp"

namespace qwadv {

namespace {

std::pair<int, int> norm_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void sort_edges(std::vector<std::pair<int, int>>& edges) {
  std::sort(edges.begin(), edges.end());
}

// Canonical relabeling for path/cycle enumeration: position pa -> 0,
// position pb -> 1, remaining positions in ascending order -> 2..n-1.
std::vector<int> placement_labels(int n, int pa, int pb) {
  std::vector<int> label(n, -1);
  label[pa] = 0;
  label[pb] = 1;
  int next = 2;
  for (int p = 0; p < n; ++p) {
    if (label[p] < 0) label[p] = next++;
  }
  return label;
}

bool is_connected(const AdjacencyMatrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      if (a(u, v) && !seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == n;
}

}  // namespace

AdjacencyMatrix Graph::adjacency() const {
  AdjacencyMatrix a = AdjacencyMatrix::Zero(n, n);
  for (auto [i, j] : edges) {
    a(i, j) = 1;
    a(j, i) = 1;
  }
  return a;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(n, 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

void validate(const Graph& g) {
  if (g.n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
  if (g.initial != 0 || g.target != 1)
    throw std::invalid_argument("canonical labeling requires initial=0, target=1");
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : g.edges) {
    if (i >= j) throw std::invalid_argument("edges must be stored as (i, j) with i < j");
    if (i < 0 || j >= g.n) throw std::invalid_argument("edge endpoint out of range");
    if (!seen.insert({i, j}).second) throw std::invalid_argument("duplicate edge");
  }
  auto deg = g.degrees();
  for (int v = 0; v < g.n; ++v) {
    if (deg[v] == 0) throw std::invalid_argument("isolated node " + std::to_string(v));
  }
  if (g.family == GraphFamily::Line) {
    if (static_cast<int>(g.edges.size()) != g.n - 1)
      throw std::invalid_argument("line graph must have n-1 edges");
    int leaves = 0;
    for (int v = 0; v < g.n; ++v) {
      if (deg[v] == 1) ++leaves;
      else if (deg[v] != 2) throw std::invalid_argument("line graph degree exceeds 2");
    }
    if (leaves != 2) throw std::invalid_argument("line graph must have exactly 2 endpoints");
    if (!is_connected(g.adjacency())) throw std::invalid_argument("line graph disconnected");
  } else if (g.family == GraphFamily::Cycle) {
    if (static_cast<int>(g.edges.size()) != g.n)
      throw std::invalid_argument("cycle graph must have n edges");
    for (int v = 0; v < g.n; ++v) {
      if (deg[v] != 2) throw std::invalid_argument("cycle graph must be 2-regular");
    }
    if (!is_connected(g.adjacency())) throw std::invalid_argument("cycle graph disconnected");
  }
}

std::vector<Graph> enumerate_line_graphs(int n) {
  if (n < 3) throw std::invalid_argument("line enumeration requires n >= 3");
  std::vector<Graph> out;
  for (int pa = 0; pa < n; ++pa) {
    for (int pb = pa + 1; pb < n; ++pb) {
      auto label = placement_labels(n, pa, pb);
      Graph g;
      g.n = n;
      g.family = GraphFamily::Line;
      for (int p = 0; p + 1 < n; ++p)
        g.edges.push_back(norm_edge(label[p], label[p + 1]));
      sort_edges(g.edges);
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<Graph> enumerate_cycle_graphs(int n) {
  if (n < 3) throw std::invalid_argument("cycle enumeration requires n >= 3");
  std::vector<Graph> out;
  for (int pa = 0; pa < n; ++pa) {
    for (int pb = pa + 1; pb < n; ++pb) {
      auto label = placement_labels(n, pa, pb);
      Graph g;
      g.n = n;
      g.family = GraphFamily::Cycle;
      for (int p = 0; p + 1 < n; ++p)
        g.edges.push_back(norm_edge(label[p], label[p + 1]));
      g.edges.push_back(norm_edge(label[n - 1], label[0]));
      sort_edges(g.edges);
      out.push_back(std::move(g));
    }
  }
  return out;
}

Graph random_graph(int n, double p_edge, std::uint64_t rng_seed, long max_redraws) {
  if (n < 3) throw std::invalid_argument("random graph requires n >= 3");
  if (p_edge <= 0.0 || p_edge >= 1.0)
    throw std::invalid_argument("edge probability must lie in (0, 1)");
  auto rng = make_rng(rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long attempt = 0; attempt < max_redraws; ++attempt) {
    Graph g;
    g.n = n;
    g.family = GraphFamily::Random;
    std::vector<int> deg(n, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (unif(rng) < p_edge) {
          g.edges.emplace_back(i, j);
          ++deg[i];
          ++deg[j];
        }
      }
    }
    if (std::find(deg.begin(), deg.end(), 0) != deg.end()) continue;
    if (!path_exists(g.adjacency(), 0, 1)) continue;
    return g;
  }
  throw generation_error("no acceptable graph after " + std::to_string(max_redraws) +
                         " draws (n=" + std::to_string(n) +
                         ", p=" + std::to_string(p_edge) + ")");
}

Graph apply_node_permutation(const Graph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n)
    throw std::invalid_argument("permutation size mismatch");
  if (perm[0] != 0 || perm[1] != 1)
    throw std::invalid_argument("permutation must fix nodes 0 and 1");
  std::vector<char> hit(g.n, 0);
  for (int v : perm) {
    if (v < 0 || v >= g.n || hit[v]) throw std::invalid_argument("not a permutation");
    hit[v] = 1;
  }
  Graph out;
  out.n = g.n;
  out.family = g.family;
  out.edges.reserve(g.edges.size());
  for (auto [i, j] : g.edges) out.edges.push_back(norm_edge(perm[i], perm[j]));
  sort_edges(out.edges);
  return out;
}

Graph shuffle_labels(const Graph& g, std::uint64_t rng_seed) {
  std::vector<int> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  if (g.n > 3) {
    auto rng = make_rng(rng_seed);
    std::shuffle(perm.begin() + 2, perm.end(), rng);
  }
  return apply_node_permutation(g, perm);
}

AdjacencyMatrix pad_adjacency(const AdjacencyMatrix& a, int big_n) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjacency must be square");
  if (big_n < a.rows()) throw std::invalid_argument("pad size smaller than matrix");
  AdjacencyMatrix out = AdjacencyMatrix::Zero(big_n, big_n);
  out.topLeftCorner(a.rows(), a.cols()) = a;
  return out;
}

bool path_exists(const AdjacencyMatrix& a, int from, int to) {
  const int n = static_cast<int>(a.rows());
  if (from < 0 || from >= n || to < 0 || to >= n) return false;
  if (from == to) return true;
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(from);
  seen[from] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v = 0; v < n; ++v) {
      if (a(u, v) && !seen[v]) {
        if (v == to) return true;
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return false;
}

std::string to_record(const Graph& g) {
  std::ostringstream ss;
  ss << family_name(g.family) << ' ' << g.n << ' ' << g.initial << ' ' << g.target;
  for (auto [i, j] : g.edges) ss << ' ' << i << '-' << j;
  return ss.str();
}

Graph from_record(const std::string& line) {
  std::istringstream ss(line);
  std::string fam;
  Graph g;
  if (!(ss >> fam >> g.n >> g.initial >> g.target))
    throw std::invalid_argument("malformed graph record: " + line);
  g.family = family_from_name(fam);
  std::string tok;
  while (ss >> tok) {
    auto dash = tok.find('-');
    if (dash == std::string::npos)
      throw std::invalid_argument("malformed edge token: " + tok);
    int i = std::stoi(tok.substr(0, dash));
    int j = std::stoi(tok.substr(dash + 1));
    g.edges.push_back(norm_edge(i, j));
  }
  sort_edges(g.edges);
  validate(g);
  return g;
}

std::string graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["family"] = family_name(g.family);
  j["n"] = g.n;
  j["initial"] = g.initial;
  j["target"] = g.target;
  auto a = g.adjacency();
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < g.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < g.n; ++k) row.push_back(a(i, k));
    rows.push_back(std::move(row));
  }
  j["adj"] = std::move(rows);
  return j.dump();
}

Graph graph_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Graph g;
  g.family = family_from_name(j.at("family").get<std::string>());
  g.n = j.at("n").get<int>();
  g.initial = j.at("initial").get<int>();
  g.target = j.at("target").get<int>();
  const auto& rows = j.at("adj");
  if (static_cast<int>(rows.size()) != g.n)
    throw std::invalid_argument("adjacency row count mismatch");
  for (int i = 0; i < g.n; ++i) {
    for (int k = i + 1; k < g.n; ++k) {
      int v = rows[i][k].get<int>();
      if (v != rows[k][i].get<int>())
        throw std::invalid_argument("adjacency not symmetric");
      if (v) g.edges.emplace_back(i, k);
    }
  }
  validate(g);
  return g;
}

const char* family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Line: return "line";
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::Random: return "random";
  }
  return "random";
}

GraphFamily family_from_name(const std::string& name) {
  if (name == "line") return GraphFamily::Line;
  if (name == "cycle") return GraphFamily::Cycle;
  if (name == "random") return GraphFamily::Random;
  throw std::invalid_argument("unknown graph family: " + name);
}

}  // namespace qwadv

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qwadv {

enum class GraphFamily { Line, Cycle, Random };

using AdjacencyMatrix = Eigen::MatrixXi;

// Undirected simple graph with two distinguished nodes. By construction node
// 0 is the walker's start and node 1 the target; generators relabel so this
// holds for every family. Edges are stored as (i, j) with i < j, sorted.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  GraphFamily family = GraphFamily::Random;
  int initial = 0;
  int target = 1;

  AdjacencyMatrix adjacency() const;
  std::vector<int> degrees() const;
};

// Throws std::invalid_argument if g violates the structural invariants:
// symmetric simple edge set in range, no isolated node, initial != target,
// and the family-specific shape (path / single cycle).
void validate(const Graph& g);

// All distinct placements of (initial, target) on the n-node path, one graph
// per unordered pair of path positions, relabeled canonically: initial -> 0,
// target -> 1, remaining nodes 2..n-1 in ascending path order. The earlier
// path position of each pair becomes the initial node. Requires n >= 3.
std::vector<Graph> enumerate_line_graphs(int n);

// Same placement scheme on the n-node cycle. Requires n >= 3.
std::vector<Graph> enumerate_cycle_graphs(int n);

// Erdos-Renyi G(n, p_edge) draw, rejection-sampled until no node is isolated
// and node 1 is reachable from node 0. Throws generation_error when
// max_redraws attempts are exhausted.
Graph random_graph(int n, double p_edge, std::uint64_t rng_seed,
                   long max_redraws = 1000000);

// Relabels g by perm (perm[old] = new). perm must fix 0 and 1.
Graph apply_node_permutation(const Graph& g, const std::vector<int>& perm);

// Random relabeling of nodes 2..n-1; nodes 0 and 1 keep their roles.
Graph shuffle_labels(const Graph& g, std::uint64_t rng_seed);

// Embeds a into the top-left block of a big_n x big_n zero matrix.
// Throws std::invalid_argument if big_n < a.rows().
AdjacencyMatrix pad_adjacency(const AdjacencyMatrix& a, int big_n);

bool path_exists(const AdjacencyMatrix& a, int from, int to);

// One-line text record: "<family> <n> <initial> <target> <i-j> <i-j> ...".
std::string to_record(const Graph& g);
Graph from_record(const std::string& line);

// JSON object with the dense adjacency matrix.
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

const char* family_name(GraphFamily f);
GraphFamily family_from_name(const std::string& name);

}  // namespace qwadv

#pragma once

#include <Eigen/Core>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qwadv/graph.hpp"

namespace qwadv {

enum class WalkerKind { Classical, Quantum, QuantumT };

// Sentinel for "never reached the threshold within the simulated window".
// Chosen as the maximum so ordinary < comparisons treat it as slowest.
inline constexpr long long kInfSteps = std::numeric_limits<long long>::max();
inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

// Column-stochastic transition matrix for the classical walk with the target
// made absorbing, plus the generator of the continuous-time dynamics.
//
// The absorbing adjacency keeps every edge except that the target's outgoing
// column is replaced by a self-loop: probability that flows into node 1
// stays there. Column j of `transition` is the neighbor-uniform distribution
// out of node j, so dp/dt = (transition - I) p conserves total probability.
struct ClassicalOperator {
  Eigen::MatrixXd transition;
  Eigen::MatrixXd generator;  // transition - I
};
ClassicalOperator build_classical_operator(const Graph& g);

// Quantum walk arena: the graph plus an edge-free sink node (index n) that
// absorbs amplitude from the target via an incoherent decay of rate gamma,
// and optionally an extra start node (index n+1) linked to node 0 that
// supports a superposed initial state.
struct QuantumSetup {
  AdjacencyMatrix adjacency;   // (n+1) or (n+2) square; sink row/col zero
  Eigen::MatrixXd hamiltonian; // adjacency cast to double
  int base_n = 0;              // node count of the underlying graph
  int sink = 0;                // = base_n
  int decay_source = 1;        // target node feeding the sink
  double gamma = 1.0;
  std::optional<int> extra_start;  // = base_n + 1 when present
};
QuantumSetup build_quantum_setup(const Graph& g, double gamma,
                                 bool with_superposition_start);

enum class InitialStateKind { NodeZero, TState };

// NodeZero: all amplitude on node 0. TState: cos(b)|0> + e^{i pi/4} sin(b)|s>
// on the extra start node s, with cos(2b) = 1/sqrt(3). TState requires a
// setup built with the extra start node.
Eigen::VectorXcd initial_state(const QuantumSetup& setup, InitialStateKind kind);

enum class ClassicalEngine { Propagator, Rk4 };
enum class QuantumEngine { Effective, Lindblad };

// One simulated trajectory sampled on the uniform grid t = k*dt,
// k = 0..steps. target_prob[k] is the target occupation (classical) or sink
// population (quantum) at t = k*dt. Hitting fields stay at the infinite
// sentinels until hitting_time() fills them.
struct WalkResult {
  WalkerKind kind = WalkerKind::Classical;
  double dt = 0.0;
  std::vector<double> target_prob;
  double hitting_time = kInfTime;
  long long hitting_steps = kInfSteps;
  double p_det_estimate = 0.0;  // last recorded probability
};

// Integrates dp/dt = (T - I) p from p(0) = e_initial. Propagator applies
// expm(generator * dt) per grid step; Rk4 is the classical fixed-step
// reference integrator. stop_at lets callers cut the run short once the
// target probability first reaches the given level.
WalkResult evolve_classical(const ClassicalOperator& op, double t_max, double dt,
                            ClassicalEngine engine = ClassicalEngine::Propagator,
                            std::optional<double> stop_at = std::nullopt);

// Integrates the open-system walk. Effective evolves the state under the
// non-Hermitian H - i(gamma/2)|1><1| with an exact per-step propagator and
// reads the sink population off the lost norm; Lindblad integrates the full
// density-matrix master equation with fixed-step RK4 and checks trace
// conservation to 1e-6 (integration_error otherwise). Both agree to 1e-6.
WalkResult evolve_quantum(const QuantumSetup& setup, InitialStateKind init,
                          double t_max, double dt,
                          QuantumEngine engine = QuantumEngine::Effective,
                          std::optional<double> stop_at = std::nullopt);

// First grid time with target_prob >= p_th, with its step index; infinite
// sentinels when the trajectory never reaches the threshold. Writes the
// hitting fields of the result and returns (time, steps).
std::pair<double, long long> hitting_time(WalkResult& result, double p_th);

// Detection threshold 1/ln(n) for the n-node comparison. Requires n >= 3 so
// the threshold is a usable probability below 1.
double threshold_for(int n);

// Exact long-time sink population: 1 minus the weight of the initial state
// on eigenvectors of the graph Hamiltonian with zero target amplitude.
// Independent of gamma for gamma > 0.
double detection_probability(const QuantumSetup& setup, InitialStateKind init);

// Size of the orbit of node 0 under automorphisms fixing the target.
int initial_orbit_size(const Graph& g);

// Symmetry ceiling 1/orbit_size on the detection probability.
double detection_bound(const Graph& g);

// Simulation parameters shared by the labeling pipeline.
struct SimConfig {
  double gamma = 1.0;
  double dt = 0.01;
  double t_max = 1000.0;
  std::optional<double> p_th;  // default threshold_for(n)
  ClassicalEngine classical_engine = ClassicalEngine::Propagator;
  QuantumEngine quantum_engine = QuantumEngine::Effective;
  // When set, labeling runs stop at the first threshold crossing and skip
  // integration entirely for quantum walkers whose exact detection
  // probability lies below the threshold (the sink population is monotone,
  // so such walkers can never cross). Trajectory exports disable this.
  bool allow_early_stop = true;
};

// Runs one walker on g and fills the hitting fields against the configured
// threshold. With early stopping the stored trajectory may be truncated at
// the crossing, or empty for quantum walkers skipped via the detection
// envelope.
WalkResult run_walker(const Graph& g, WalkerKind kind, const SimConfig& cfg);

// CSV trajectory ("t,p_target" / "t,p_sink") and JSON sidecar with the
// hitting summary and run parameters.
std::string trajectory_csv(const WalkResult& r);
std::string result_sidecar_json(const WalkResult& r, double gamma, double p_th);

const char* walker_name(WalkerKind k);
WalkerKind walker_from_name(const std::string& name);

}  // namespace qwadv

#include "qwadv/walk.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qwadv/errors.hpp"
#include "qwadv/matexp.hpp"

namespace qwadv {

namespace {

using cd = std::complex<double>;

long long grid_steps(double t_max, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_max >= dt)) throw std::invalid_argument("t_max must be at least dt");
  return static_cast<long long>(std::floor(t_max / dt + 1e-9));
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Master-equation right-hand side: coherent part plus decay of rate gamma
// from node `src` into node `sink`.
Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXd& h, const Eigen::MatrixXcd& rho,
                              double gamma, int src, int sink) {
  Eigen::MatrixXcd out = cd(0, -1) * (h * rho - rho * h);
  out.row(src) -= (gamma / 2.0) * rho.row(src);
  out.col(src) -= (gamma / 2.0) * rho.col(src);
  out(sink, sink) += gamma * rho(src, src);
  return out;
}

}  // namespace

ClassicalOperator build_classical_operator(const Graph& g) {
  validate(g);
  const int n = g.n;
  Eigen::MatrixXd absorbing = g.adjacency().cast<double>();
  absorbing.col(g.target).setZero();
  absorbing(g.target, g.target) = 1.0;

  ClassicalOperator op;
  op.transition = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double deg = absorbing.col(j).sum();
    if (deg <= 0.0)
      throw std::invalid_argument("node " + std::to_string(j) + " has no outgoing edge");
    op.transition.col(j) = absorbing.col(j) / deg;
  }
  op.generator = op.transition - Eigen::MatrixXd::Identity(n, n);
  return op;
}

WalkResult evolve_classical(const ClassicalOperator& op, double t_max, double dt,
                            ClassicalEngine engine, std::optional<double> stop_at) {
  const long long steps = grid_steps(t_max, dt);
  const int n = static_cast<int>(op.transition.rows());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p(0) = 1.0;

  WalkResult res;
  res.kind = WalkerKind::Classical;
  res.dt = dt;
  res.target_prob.reserve(static_cast<std::size_t>(steps) + 1);
  res.target_prob.push_back(p(1));

  Eigen::MatrixXd prop;
  if (engine == ClassicalEngine::Propagator) prop = expm(Eigen::MatrixXd(op.generator * dt));

  for (long long k = 1; k <= steps; ++k) {
    if (engine == ClassicalEngine::Propagator) {
      p = prop * p;
    } else {
      Eigen::VectorXd k1 = op.generator * p;
      Eigen::VectorXd k2 = op.generator * (p + 0.5 * dt * k1);
      Eigen::VectorXd k3 = op.generator * (p + 0.5 * dt * k2);
      Eigen::VectorXd k4 = op.generator * (p + dt * k3);
      p += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    res.target_prob.push_back(p(1));
    if (stop_at && p(1) >= *stop_at) break;
  }
  res.p_det_estimate = res.target_prob.back();
  return res;
}

QuantumSetup build_quantum_setup(const Graph& g, double gamma,
                                 bool with_superposition_start) {
  validate(g);
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const int n = g.n;
  const int dim = n + 1 + (with_superposition_start ? 1 : 0);

  QuantumSetup s;
  s.adjacency = pad_adjacency(g.adjacency(), dim);
  if (with_superposition_start) {
    s.adjacency(0, n + 1) = 1;
    s.adjacency(n + 1, 0) = 1;
    s.extra_start = n + 1;
  }
  s.hamiltonian = s.adjacency.cast<double>();
  s.base_n = n;
  s.sink = n;
  s.decay_source = g.target;
  s.gamma = gamma;
  return s;
}

Eigen::VectorXcd initial_state(const QuantumSetup& setup, InitialStateKind kind) {
  const int dim = static_cast<int>(setup.hamiltonian.rows());
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  if (kind == InitialStateKind::NodeZero) {
    psi(0) = 1.0;
    return psi;
  }
  if (!setup.extra_start)
    throw std::invalid_argument("superposed start requires the extra start node");
  // cos(2b) = 1/sqrt(3) balances the even and odd components of the start.
  const double beta = 0.5 * std::acos(1.0 / std::sqrt(3.0));
  psi(0) = std::cos(beta);
  psi(*setup.extra_start) = std::polar(std::sin(beta), M_PI / 4.0);
  return psi;
}

WalkResult evolve_quantum(const QuantumSetup& setup, InitialStateKind init,
                          double t_max, double dt, QuantumEngine engine,
                          std::optional<double> stop_at) {
  const long long steps = grid_steps(t_max, dt);
  const Eigen::VectorXcd psi0 = initial_state(setup, init);

  WalkResult res;
  res.kind = setup.extra_start ? WalkerKind::QuantumT : WalkerKind::Quantum;
  res.dt = dt;
  res.target_prob.reserve(static_cast<std::size_t>(steps) + 1);
  res.target_prob.push_back(0.0);

  if (engine == QuantumEngine::Effective) {
    // Amplitude lost from the decaying state is exactly the sink population,
    // so a pure-state evolution under the damped Hamiltonian suffices.
    Eigen::MatrixXcd h_eff = setup.hamiltonian.cast<cd>();
    h_eff(setup.decay_source, setup.decay_source) -= cd(0, setup.gamma / 2.0);
    Eigen::MatrixXcd u = expm(Eigen::MatrixXcd(cd(0, -1) * dt * h_eff));
    Eigen::VectorXcd psi = psi0;
    for (long long k = 1; k <= steps; ++k) {
      psi = u * psi;
      double sink = 1.0 - psi.squaredNorm();
      res.target_prob.push_back(sink);
      if (stop_at && sink >= *stop_at) break;
    }
  } else {
    Eigen::MatrixXcd rho = psi0 * psi0.adjoint();
    const Eigen::MatrixXd& h = setup.hamiltonian;
    const double gamma = setup.gamma;
    const int src = setup.decay_source;
    for (long long k = 1; k <= steps; ++k) {
      Eigen::MatrixXcd k1 = lindblad_rhs(h, rho, gamma, src, setup.sink);
      Eigen::MatrixXcd k2 = lindblad_rhs(h, rho + (0.5 * dt) * k1, gamma, src, setup.sink);
      Eigen::MatrixXcd k3 = lindblad_rhs(h, rho + (0.5 * dt) * k2, gamma, src, setup.sink);
      Eigen::MatrixXcd k4 = lindblad_rhs(h, rho + dt * k3, gamma, src, setup.sink);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      cd tr = rho.trace();
      if (std::abs(tr.real() - 1.0) > 1e-6 || std::abs(tr.imag()) > 1e-6)
        throw integration_error("density matrix trace drifted to " +
                                std::to_string(tr.real()) + " at t=" +
                                std::to_string(k * dt));
      double sink = rho(setup.sink, setup.sink).real();
      res.target_prob.push_back(sink);
      if (stop_at && sink >= *stop_at) break;
    }
  }
  res.p_det_estimate = res.target_prob.back();
  return res;
}

std::pair<double, long long> hitting_time(WalkResult& result, double p_th) {
  for (std::size_t k = 0; k < result.target_prob.size(); ++k) {
    if (result.target_prob[k] >= p_th) {
      result.hitting_time = static_cast<double>(k) * result.dt;
      result.hitting_steps = static_cast<long long>(k);
      return {result.hitting_time, result.hitting_steps};
    }
  }
  result.hitting_time = kInfTime;
  result.hitting_steps = kInfSteps;
  return {kInfTime, kInfSteps};
}

double threshold_for(int n) {
  if (n <= 2)
    throw std::invalid_argument("threshold 1/ln(n) is not a usable probability for n <= 2");
  return 1.0 / std::log(static_cast<double>(n));
}

double detection_probability(const QuantumSetup& setup, InitialStateKind init) {
  const Eigen::VectorXcd psi_full = initial_state(setup, init);
  const int dim = static_cast<int>(setup.hamiltonian.rows());

  // Work on the graph block: every node except the edge-free sink.
  std::vector<int> keep;
  keep.reserve(dim - 1);
  for (int i = 0; i < dim; ++i)
    if (i != setup.sink) keep.push_back(i);
  const int m = static_cast<int>(keep.size());

  Eigen::MatrixXd hb(m, m);
  Eigen::VectorXcd psi(m);
  for (int i = 0; i < m; ++i) {
    psi(i) = psi_full(keep[i]);
    for (int j = 0; j < m; ++j) hb(i, j) = setup.hamiltonian(keep[i], keep[j]);
  }
  int target = 0;
  while (keep[target] != setup.decay_source) ++target;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hb);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();

  // Within each eigenspace only the component along the projected target
  // vector decays; the orthogonal remainder never reaches the sink.
  double dark = 0.0;
  int i = 0;
  while (i < m) {
    int j = i;
    while (j + 1 < m && vals(j + 1) - vals(i) <= 1e-8) ++j;
    double bright_norm2 = 0.0;
    cd bright_amp = 0.0;
    double weight = 0.0;
    for (int k = i; k <= j; ++k) {
      const double c = vecs(target, k);
      const cd overlap = vecs.col(k).cast<cd>().dot(psi);
      bright_norm2 += c * c;
      bright_amp += c * overlap;
      weight += std::norm(overlap);
    }
    if (bright_norm2 > 1e-18)
      dark += weight - std::norm(bright_amp) / bright_norm2;
    else
      dark += weight;
    i = j + 1;
  }
  return std::clamp(1.0 - dark, 0.0, 1.0);
}

namespace {

// Extends a partial node mapping to a full automorphism if possible.
// assigned maps nodes [0, depth) already; adj is the dense adjacency.
bool extend_automorphism(const AdjacencyMatrix& adj, const std::vector<int>& deg,
                         std::vector<int>& map, std::vector<char>& used, int depth) {
  const int n = static_cast<int>(adj.rows());
  if (depth == n) return true;
  for (int w = 0; w < n; ++w) {
    if (used[w] || deg[w] != deg[depth]) continue;
    bool ok = true;
    for (int u = 0; u < depth && ok; ++u)
      ok = adj(depth, u) == adj(w, map[u]);
    if (!ok) continue;
    map[depth] = w;
    used[w] = 1;
    if (extend_automorphism(adj, deg, map, used, depth + 1)) return true;
    used[w] = 0;
  }
  return false;
}

}  // namespace

int initial_orbit_size(const Graph& g) {
  validate(g);
  const AdjacencyMatrix adj = g.adjacency();
  const std::vector<int> deg = g.degrees();
  int orbit = 1;  // identity maps 0 to itself
  for (int v = 2; v < g.n; ++v) {
    if (deg[v] != deg[0]) continue;
    std::vector<int> map(g.n, -1);
    std::vector<char> used(g.n, 0);
    map[0] = v;
    used[v] = 1;
    map[1] = 1;
    used[1] = 1;
    // The recursion only checks pairs involving nodes >= 2, so the (0, 1)
    // pair needs an explicit check here.
    if (adj(0, 1) != adj(v, 1)) continue;
    if (extend_automorphism(adj, deg, map, used, 2)) ++orbit;
  }
  return orbit;
}

double detection_bound(const Graph& g) {
  return 1.0 / static_cast<double>(initial_orbit_size(g));
}

WalkResult run_walker(const Graph& g, WalkerKind kind, const SimConfig& cfg) {
  const double p_th = cfg.p_th ? *cfg.p_th : threshold_for(g.n);
  std::optional<double> stop = cfg.allow_early_stop ? std::optional<double>(p_th)
                                                    : std::nullopt;
  if (kind == WalkerKind::Classical) {
    auto op = build_classical_operator(g);
    WalkResult res = evolve_classical(op, cfg.t_max, cfg.dt, cfg.classical_engine, stop);
    hitting_time(res, p_th);
    return res;
  }

  const bool superpos = (kind == WalkerKind::QuantumT);
  QuantumSetup setup = build_quantum_setup(g, cfg.gamma, superpos);
  const InitialStateKind init =
      superpos ? InitialStateKind::TState : InitialStateKind::NodeZero;

  if (cfg.allow_early_stop) {
    // The sink population is nondecreasing with limit detection_probability,
    // so a walker whose limit sits below the threshold can never hit.
    double p_det = detection_probability(setup, init);
    if (p_det < p_th - 1e-12) {
      WalkResult res;
      res.kind = kind;
      res.dt = cfg.dt;
      res.p_det_estimate = p_det;
      return res;  // hitting fields stay at the infinite sentinels
    }
  }
  WalkResult res = evolve_quantum(setup, init, cfg.t_max, cfg.dt, cfg.quantum_engine, stop);
  res.kind = kind;
  hitting_time(res, p_th);
  return res;
}

std::string trajectory_csv(const WalkResult& r) {
  std::ostringstream ss;
  ss << (r.kind == WalkerKind::Classical ? "t,p_target\n" : "t,p_sink\n");
  for (std::size_t k = 0; k < r.target_prob.size(); ++k)
    ss << fmt_double(static_cast<double>(k) * r.dt) << ','
       << fmt_double(r.target_prob[k]) << '\n';
  return ss.str();
}

std::string result_sidecar_json(const WalkResult& r, double gamma, double p_th) {
  nlohmann::json j;
  j["walker"] = walker_name(r.kind);
  j["dt"] = r.dt;
  j["gamma"] = gamma;
  j["p_th"] = p_th;
  if (r.hitting_steps == kInfSteps) {
    j["tau"] = "inf";
    j["steps"] = "inf";
  } else {
    j["tau"] = r.hitting_time;
    j["steps"] = r.hitting_steps;
  }
  j["p_det_estimate"] = r.p_det_estimate;
  return j.dump();
}

const char* walker_name(WalkerKind k) {
  switch (k) {
    case WalkerKind::Classical: return "classical";
    case WalkerKind::Quantum: return "quantum";
    case WalkerKind::QuantumT: return "quantum-t";
  }
  return "classical";
}

WalkerKind walker_from_name(const std::string& name) {
  if (name == "classical") return WalkerKind::Classical;
  if (name == "quantum") return WalkerKind::Quantum;
  if (name == "quantum-t") return WalkerKind::QuantumT;
  throw std::invalid_argument("unknown walker kind: " + name);
}

}  // namespace qwadv

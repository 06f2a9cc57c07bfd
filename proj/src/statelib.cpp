#include "symlearn/statelib.hpp"

#include "symlearn/errors.hpp"
#include "symlearn/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace symlearn {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_range(int value, int lo, int hi, const char* what) {
  if (value < lo || value > hi) {
    throw ResourceError(std::string(what) + " must be in [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "], got " + std::to_string(value));
  }
}

}  // namespace

Eigen::Matrix2cd hadamard_matrix() {
  Eigen::Matrix2cd h;
  h << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return h;
}

StateVector prepare_bell() {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
  amps[1] = kInvSqrt2;
  amps[2] = kInvSqrt2;
  return StateVector::from_amplitudes(std::move(amps));
}

StateVector prepare_ghz(int num_qubits) {
  check_range(num_qubits, 1, kMaxStateQubits, "GHZ size");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
  amps[0] = kInvSqrt2;
  amps[amps.size() - 1] = kInvSqrt2;
  return StateVector::from_amplitudes(std::move(amps));
}

std::vector<std::pair<int, int>> cluster_edges(int side) {
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const int v = r * side + c;
      if (c + 1 < side) edges.emplace_back(v, v + 1);
      if (r + 1 < side) edges.emplace_back(v, v + side);
    }
  }
  return edges;
}

StateVector prepare_cluster(int side) {
  if (side < 2) throw ArgumentError("cluster side must be >= 2");
  check_range(side * side, 4, kMaxStateQubits, "cluster size");
  const int n = side * side;
  const auto edges = cluster_edges(side);
  const Eigen::Index dim = Eigen::Index{1} << n;
  const double mag = std::pow(2.0, -0.5 * n);
  Eigen::VectorXcd amps(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    int parity = 0;
    for (const auto& [a, b] : edges) {
      const auto ba = (static_cast<std::uint64_t>(i) >> (n - 1 - a)) & 1U;
      const auto bb = (static_cast<std::uint64_t>(i) >> (n - 1 - b)) & 1U;
      parity ^= static_cast<int>(ba & bb);
    }
    amps[i] = parity ? -mag : mag;
  }
  return StateVector::from_amplitudes(std::move(amps));
}

Circuit bell_circuit() {
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  return {Gate::single(0, hadamard_matrix()), Gate::cnot(0, 1), Gate::single(1, x)};
}

Circuit ghz_circuit(int num_qubits) {
  Circuit c{Gate::single(0, hadamard_matrix())};
  for (int q = 0; q + 1 < num_qubits; ++q) c.push_back(Gate::cnot(q, q + 1));
  return c;
}

Circuit cluster_circuit(int side) {
  Circuit c;
  for (int q = 0; q < side * side; ++q) c.push_back(Gate::single(q, hadamard_matrix()));
  for (const auto& [a, b] : cluster_edges(side)) c.push_back(Gate::cz(a, b));
  return c;
}

// ---- TFIM ------------------------------------------------------------------

void apply_tfim_hamiltonian(int n, double coupling, const Eigen::VectorXd& in,
                            Eigen::VectorXd& out) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  out.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    // sigma^z = +1 on |0>, -1 on |1>.
    const int ones = std::popcount(static_cast<std::uint64_t>(i));
    out[i] = 0.25 * (n - 2 * ones) * in[i];
  }
  for (int q = 0; q + 1 < n; ++q) {
    const Eigen::Index mask = (Eigen::Index{1} << (n - 1 - q)) | (Eigen::Index{1} << (n - 2 - q));
    for (Eigen::Index i = 0; i < dim; ++i) out[i] -= 0.25 * coupling * in[i ^ mask];
  }
}

namespace {

// Smallest eigenpair of the symmetric operator by Lanczos with full
// reorthogonalization, restarted from the current Ritz vector.
std::pair<double, Eigen::VectorXd> lanczos_ground(
    Eigen::Index dim, const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply) {
  Rng rng(0x5eed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = gauss(rng);
  start.normalize();

  const Eigen::Index krylov = std::min<Eigen::Index>(dim, 120);
  double energy = 0.0;
  Eigen::VectorXd ritz = start;
  Eigen::VectorXd w;
  for (int restart = 0; restart < 200; ++restart) {
    Eigen::MatrixXd basis(dim, krylov);
    std::vector<double> alpha, beta;
    basis.col(0) = start;
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < krylov; ++j) {
      apply(basis.col(j), w);
      const double a = basis.col(j).dot(w);
      alpha.push_back(a);
      m = j + 1;
      // Two passes of classical Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd proj = basis.leftCols(m).transpose() * w;
        w -= basis.leftCols(m) * proj;
      }
      const double b = w.norm();
      if (j + 1 == krylov || b < 1e-13) break;
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    energy = eig.eigenvalues()[0];
    ritz = basis.leftCols(m) * eig.eigenvectors().col(0);
    ritz.normalize();
    apply(ritz, w);
    const double residual = (w - energy * ritz).norm();
    if (residual < 1e-11) break;
    start = ritz;
  }
  return {energy, ritz};
}

}  // namespace

StateVector prepare_tfim_ground(int num_qubits, double coupling) {
  check_range(num_qubits, 2, kMaxTfimQubits, "TFIM size");
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  auto [energy, v] = lanczos_ground(dim, [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    apply_tfim_hamiltonian(num_qubits, coupling, in, out);
  });
  (void)energy;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < dim; ++i) {
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  }
  if (v[best] < 0) v = -v;
  return StateVector::from_amplitudes(v.cast<Complex>());
}

double tfim_energy(const StateVector& state, double coupling) {
  const Eigen::VectorXd re = state.amplitudes().real();
  const Eigen::VectorXd im = state.amplitudes().imag();
  Eigen::VectorXd hre, him;
  apply_tfim_hamiltonian(state.num_qubits(), coupling, re, hre);
  apply_tfim_hamiltonian(state.num_qubits(), coupling, im, him);
  return re.dot(hre) + im.dot(him);
}

// ---- Rydberg ----------------------------------------------------------------

double RydbergParams::blockade_radius() const { return std::pow(c6 / omega_max, 1.0 / 6.0); }

double RydbergParams::lattice_constant() const { return blockade_radius() / rb_over_a; }

void validate(const RydbergParams& p) {
  if (p.num_qubits < 2) throw ArgumentError("Rydberg chain needs L >= 2");
  check_range(p.num_qubits, 2, kMaxRydbergQubits, "Rydberg chain size");
  if (!(p.rb_over_a > 0)) throw ArgumentError("R_b / a must be positive");
  if (!(p.c6 > 0)) throw ArgumentError("C6 must be positive");
  if (!(p.omega_max > 0)) throw ArgumentError("omega_max must be positive");
  const auto& s = p.schedule;
  if (!(s.total_time > 0)) throw ArgumentError("total_time must be positive");
  if (!(s.omega_ramp_fraction > 0 && s.omega_ramp_fraction < 1)) {
    throw ArgumentError("omega_ramp_fraction must be in (0, 1)");
  }
  if (s.time_step < 0 || s.time_step > s.total_time) {
    throw ArgumentError("time_step must be in (0, total_time], or 0 for automatic");
  }
}

double rydberg_omega(const RydbergParams& p, double t) {
  const double ramp = p.schedule.omega_ramp_fraction * p.schedule.total_time;
  return p.omega_max * std::min(1.0, t / ramp);
}

double rydberg_delta(const RydbergParams& p, double t) {
  const double f = t / p.schedule.total_time;
  return p.delta_start() + (p.delta_target() - p.delta_start()) * f;
}

double rydberg_interaction(const RydbergParams& p, int j, int k) {
  const double r = p.lattice_constant() * std::abs(j - k);
  return p.c6 / std::pow(r, 6);
}

namespace {

// Diagonal pieces of H(t): interaction energy and excitation count per basis state.
struct RydbergDiagonal {
  Eigen::VectorXd interaction;
  Eigen::VectorXd excitations;
};

RydbergDiagonal rydberg_diagonal(const RydbergParams& p) {
  const int n = p.num_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  RydbergDiagonal d{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
  std::vector<std::vector<double>> v(static_cast<std::size_t>(n), std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) v[j][k] = rydberg_interaction(p, j, k);
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto x = static_cast<std::uint64_t>(i);
    d.excitations[i] = std::popcount(x);
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!((x >> (n - 1 - j)) & 1U)) continue;
      for (int k = j + 1; k < n; ++k) {
        if ((x >> (n - 1 - k)) & 1U) e += v[j][k];
      }
    }
    d.interaction[i] = e;
  }
  return d;
}

}  // namespace

HamiltonianMatrix build_rydberg_hamiltonian(const RydbergParams& p, double t) {
  validate(p);
  if (t < 0 || t > p.schedule.total_time) throw ArgumentError("time outside the schedule");
  const int n = p.num_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const auto diag = rydberg_diagonal(p);
  const double omega = rydberg_omega(p, t);
  const double delta = rydberg_delta(p, t);
  HamiltonianMatrix h = HamiltonianMatrix::Zero(dim, dim);
  const Complex lower = 0.5 * omega * std::exp(Complex(0, -p.phi));  // <1|H|0>
  for (Eigen::Index i = 0; i < dim; ++i) {
    h(i, i) = diag.interaction[i] - delta * diag.excitations[i];
    for (int q = 0; q < n; ++q) {
      const Eigen::Index b = Eigen::Index{1} << (n - 1 - q);
      if (i & b) continue;
      h(i | b, i) = lower;
      h(i, i | b) = std::conj(lower);
    }
  }
  return h;
}

StateVector adiabatic_evolve(const RydbergParams& p, EvolutionStats* stats) {
  validate(p);
  const int n = p.num_qubits;
  const Eigen::Index dim = Eigen::Index{1} << n;
  const auto diag = rydberg_diagonal(p);
  const auto& sched = p.schedule;

  // Max absolute row sum over the schedule bounds every ||H(t)||.
  const double max_delta = std::max(std::abs(p.delta_start()), std::abs(p.delta_target()));
  double h_norm = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    h_norm = std::max(h_norm, std::abs(diag.interaction[i]) + max_delta * diag.excitations[i]);
  }
  h_norm += 0.5 * p.omega_max * n;

  double dt = sched.time_step > 0 ? sched.time_step : 0.05 / h_norm;
  const long steps = static_cast<long>(std::ceil(sched.total_time / dt - 1e-9));
  dt = sched.total_time / static_cast<double>(steps);

  const Complex lower = 0.5 * std::exp(Complex(0, -p.phi));
  // k = -i H(t) psi
  auto deriv = [&](double t, const Eigen::VectorXcd& psi, Eigen::VectorXcd& k) {
    const double omega = rydberg_omega(p, t);
    const double delta = rydberg_delta(p, t);
    const Complex down = omega * lower;
    const Complex up = std::conj(down);
    for (Eigen::Index i = 0; i < dim; ++i) {
      Complex acc = (diag.interaction[i] - delta * diag.excitations[i]) * psi[i];
      for (int q = 0; q < n; ++q) {
        const Eigen::Index b = Eigen::Index{1} << (n - 1 - q);
        acc += ((i & b) ? down : up) * psi[i ^ b];
      }
      k[i] = Complex(acc.imag(), -acc.real());
    }
  };

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[0] = 1.0;
  Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  double max_drift = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    deriv(t, psi, k1);
    tmp = psi + (0.5 * dt) * k1;
    deriv(t + 0.5 * dt, tmp, k2);
    tmp = psi + (0.5 * dt) * k2;
    deriv(t + 0.5 * dt, tmp, k3);
    tmp = psi + dt * k3;
    deriv(t + dt, tmp, k4);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double norm = psi.norm();
    const double drift = std::abs(norm * norm - 1.0);
    if (!std::isfinite(norm) || drift > 1e-3) {
      throw NumericalError("adiabatic integration unstable: norm drift " + std::to_string(drift) +
                           " at step " + std::to_string(s) + "; reduce time_step");
    }
    max_drift = std::max(max_drift, drift);
    psi /= norm;
  }
  if (stats) *stats = {steps, dt, max_drift};
  return StateVector::from_amplitudes(std::move(psi));
}

std::vector<PhasePoint> phase_diagram(const std::vector<double>& delta_over_omega,
                                      const std::vector<double>& rb_over_a,
                                      const RydbergParams& base, int jobs) {
  std::vector<PhasePoint> points;
  for (double dov : delta_over_omega) {
    for (double rb : rb_over_a) points.push_back({dov, rb, 0.0});
  }
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    RydbergParams p = base;
    p.delta_over_omega = points[i].delta_over_omega;
    p.rb_over_a = points[i].rb_over_a;
    points[i].entropy_nats = entanglement_entropy(adiabatic_evolve(p), p.num_qubits / 2);
  });
  return points;
}

std::string phase_diagram_csv(const std::vector<PhasePoint>& points) {
  std::ostringstream os;
  os << "delta_over_omega,rb_over_a,entropy_nats\n" << std::setprecision(10);
  for (const auto& pt : points) {
    os << pt.delta_over_omega << ',' << pt.rb_over_a << ',' << pt.entropy_nats << '\n';
  }
  return os.str();
}

// ---- StateSpec ---------------------------------------------------------------

std::string to_string(StateSpec::Kind kind) {
  switch (kind) {
    case StateSpec::Kind::bell: return "bell";
    case StateSpec::Kind::ghz: return "ghz";
    case StateSpec::Kind::cluster: return "cluster";
    case StateSpec::Kind::tfim: return "tfim";
    case StateSpec::Kind::rydberg: return "rydberg";
  }
  return "unknown";
}

StateSpec::Kind state_kind_from_string(const std::string& name) {
  for (auto k : {StateSpec::Kind::bell, StateSpec::Kind::ghz, StateSpec::Kind::cluster,
                 StateSpec::Kind::tfim, StateSpec::Kind::rydberg}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown state kind '" + name + "'");
}

std::string StateSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::bell: os << "bell"; break;
    case Kind::ghz: os << "ghz" << num_qubits; break;
    case Kind::cluster: os << "cluster" << side << 'x' << side; break;
    case Kind::tfim: os << "tfim" << num_qubits << "_J" << coupling; break;
    case Kind::rydberg:
      os << "rydberg" << rydberg.num_qubits << "_" << rydberg.delta_over_omega << "_"
         << rydberg.rb_over_a;
      break;
  }
  return os.str();
}

StateSpec StateSpec::ghz(int n) {
  StateSpec s;
  s.kind = Kind::ghz;
  s.num_qubits = n;
  return s;
}

StateSpec StateSpec::bell() {
  StateSpec s;
  s.kind = Kind::bell;
  s.num_qubits = 2;
  return s;
}

StateSpec StateSpec::cluster(int side) {
  StateSpec s;
  s.kind = Kind::cluster;
  s.side = side;
  s.num_qubits = side * side;
  return s;
}

StateSpec StateSpec::tfim(int n, double coupling) {
  StateSpec s;
  s.kind = Kind::tfim;
  s.num_qubits = n;
  s.coupling = coupling;
  return s;
}

StateSpec StateSpec::rydberg_chain(const RydbergParams& p) {
  StateSpec s;
  s.kind = Kind::rydberg;
  s.rydberg = p;
  s.num_qubits = p.num_qubits;
  return s;
}

StateVector prepare_state(const StateSpec& spec) {
  switch (spec.kind) {
    case StateSpec::Kind::bell: return prepare_bell();
    case StateSpec::Kind::ghz: return prepare_ghz(spec.num_qubits);
    case StateSpec::Kind::cluster: return prepare_cluster(spec.side);
    case StateSpec::Kind::tfim: return prepare_tfim_ground(spec.num_qubits, spec.coupling);
    case StateSpec::Kind::rydberg: return adiabatic_evolve(spec.rydberg);
  }
  throw ArgumentError("unknown state kind");
}

std::optional<Circuit> preparation_circuit(const StateSpec& spec) {
  switch (spec.kind) {
    case StateSpec::Kind::bell: return bell_circuit();
    case StateSpec::Kind::ghz: return ghz_circuit(spec.num_qubits);
    case StateSpec::Kind::cluster: return cluster_circuit(spec.side);
    default: return std::nullopt;
  }
}

}  // namespace symlearn

#pragma once

// Target states: Bell, GHZ, planar cluster, TFIM ground state and the
// adiabatically prepared Rydberg chain.

#include "symlearn/qsim.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace symlearn {

// (|01> + |10>) / sqrt(2).
StateVector prepare_bell();
// (|0^L> + |1^L>) / sqrt(2).
StateVector prepare_ghz(int num_qubits);
// CZ on every edge of the open side x side grid applied to |+>^L. Qubit (r, c) is r * side + c.
StateVector prepare_cluster(int side);

// Gate-level preparation circuits from |0^L>, used when state preparation is noisy.
Circuit bell_circuit();
Circuit ghz_circuit(int num_qubits);
Circuit cluster_circuit(int side);
std::vector<std::pair<int, int>> cluster_edges(int side);

Eigen::Matrix2cd hadamard_matrix();

// ---- Transverse-field Ising chain ------------------------------------------
//
// H = 0.5 sum_i S^z_i - J sum_i S^x_i S^x_{i+1} with S = sigma / 2 and open
// boundaries. Real symmetric in the computational basis.

inline constexpr int kMaxTfimQubits = 14;

// out = H * in, matrix-free.
void apply_tfim_hamiltonian(int num_qubits, double coupling, const Eigen::VectorXd& in,
                            Eigen::VectorXd& out);

// Ground state by restarted Lanczos. The largest-magnitude amplitude is made
// real positive (lowest index on ties).
StateVector prepare_tfim_ground(int num_qubits, double coupling);
double tfim_energy(const StateVector& state, double coupling);

// ---- Rydberg chain ---------------------------------------------------------

using HamiltonianMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxRydbergQubits = 10;
inline constexpr double kMHz = 1e6;

// Omega ramps 0 -> omega_max over the first omega_ramp_fraction of the run and
// then holds; Delta ramps linearly from delta_start to the target over the full run.
struct AdiabaticSchedule {
  double total_time = 3e-6;          // s
  double omega_ramp_fraction = 0.1;  // in (0, 1)
  double delta_start_ratio = -6.0;   // delta_start = ratio * omega_max
  double time_step = 0.0;            // s; 0 picks the step from the Hamiltonian norm
};

struct RydbergParams {
  int num_qubits = 7;
  double delta_over_omega = 3.0;
  double rb_over_a = 1.3;
  double omega_max = 2 * std::numbers::pi * 2 * kMHz;     // rad/s
  double c6 = 862.0 * 2 * std::numbers::pi * kMHz;         // rad/s um^6
  double phi = 0.0;
  AdiabaticSchedule schedule;

  double blockade_radius() const;   // um, from C6 / R_b^6 = omega_max
  double lattice_constant() const;  // um
  double delta_target() const { return delta_over_omega * omega_max; }
  double delta_start() const { return schedule.delta_start_ratio * omega_max; }
};

void validate(const RydbergParams& p);

double rydberg_omega(const RydbergParams& p, double t);
double rydberg_delta(const RydbergParams& p, double t);
// V_jk = C6 / (a |j - k|)^6.
double rydberg_interaction(const RydbergParams& p, int j, int k);

HamiltonianMatrix build_rydberg_hamiltonian(const RydbergParams& p, double t);

struct EvolutionStats {
  long steps = 0;
  double time_step = 0.0;
  double max_norm_drift = 0.0;
};

// Fixed-step RK4 integration of the Schroedinger equation from |0^L>.
StateVector adiabatic_evolve(const RydbergParams& p, EvolutionStats* stats = nullptr);

struct PhasePoint {
  double delta_over_omega = 0.0;
  double rb_over_a = 0.0;
  double entropy_nats = 0.0;
};

// Half-chain entanglement entropy of the adiabatic state at each grid point.
std::vector<PhasePoint> phase_diagram(const std::vector<double>& delta_over_omega,
                                      const std::vector<double>& rb_over_a,
                                      const RydbergParams& base, int jobs = 1);
std::string phase_diagram_csv(const std::vector<PhasePoint>& points);

// ---- Named state specifications --------------------------------------------

struct StateSpec {
  enum class Kind { bell, ghz, cluster, tfim, rydberg };

  Kind kind = Kind::ghz;
  int num_qubits = 3;  // bell: 2; cluster: side * side
  int side = 2;        // cluster only
  double coupling = 1.0;  // tfim only
  RydbergParams rydberg;  // rydberg only

  std::string label() const;
  static StateSpec ghz(int num_qubits);
  static StateSpec bell();
  static StateSpec cluster(int side);
  static StateSpec tfim(int num_qubits, double coupling = 1.0);
  static StateSpec rydberg_chain(const RydbergParams& p);
};

std::string to_string(StateSpec::Kind kind);
StateSpec::Kind state_kind_from_string(const std::string& name);

StateVector prepare_state(const StateSpec& spec);
// Gate-level circuit for the state when one exists (Bell, GHZ, cluster).
std::optional<Circuit> preparation_circuit(const StateSpec& spec);

}  // namespace symlearn

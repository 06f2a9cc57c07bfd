#include "symlearn/noise.hpp"

#include "symlearn/errors.hpp"

#include <random>

namespace symlearn {

namespace {

std::uint64_t flip_readout(std::uint64_t outcome, int num_qubits, double p, Rng& rng) {
  if (p <= 0) return outcome;
  std::bernoulli_distribution flip(p);
  for (int q = 0; q < num_qubits; ++q) {
    if (flip(rng)) outcome ^= std::uint64_t{1} << (num_qubits - 1 - q);
  }
  return outcome;
}

std::uint64_t draw_one(const std::vector<double>& probs, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0) return i;
  }
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0) return i;
  }
  return 0;
}

}  // namespace

void validate(const NoiseModel& model) {
  if (!(model.p_error >= 0.0 && model.p_error <= 1.0)) {
    throw ArgumentError("p_error must lie in [0, 1]");
  }
}

void reset_qubit(StateVector& state, int qubit, Rng& rng) {
  const std::uint64_t b = std::uint64_t{1} << (state.num_qubits() - 1 - qubit);
  double p1 = 0.0;
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (i & b) p1 += std::norm(state.amplitudes()[static_cast<Eigen::Index>(i)]);
  }
  p1 /= state.norm_squared();
  std::bernoulli_distribution outcome_one(std::min(1.0, std::max(0.0, p1)));
  if (outcome_one(rng)) {
    state.project(qubit, 1);
    state.apply_x(qubit);
  } else {
    state.project(qubit, 0);
  }
}

void noisy_apply_inplace(StateVector& state, const Gate& gate, const NoiseModel& model, Rng& rng) {
  apply_gate(state, gate);
  if (!model.active()) return;
  std::bernoulli_distribution event(model.p_error);
  const auto targets = gate.targets();
  for (int q : targets) {
    if (event(rng)) state.apply_x(q);
  }
  for (int q : targets) {
    if (event(rng)) reset_qubit(state, q, rng);
  }
}

StateVector noisy_apply(StateVector state, const Gate& gate, const NoiseModel& model, Rng& rng) {
  validate(model);
  noisy_apply_inplace(state, gate, model, rng);
  return state;
}

EmpiricalDistribution noisy_sample(const StateVector& state, const MeasurementBasis& basis,
                                   std::int64_t shots, const NoiseModel& model, Rng& rng) {
  validate(model);
  if (shots < 1) throw ArgumentError("shots must be >= 1");
  EmpiricalDistribution clean = sample_measurements(state, basis, shots, rng);
  if (!model.active()) return clean;
  EmpiricalDistribution out = clean;
  out.counts.clear();
  for (const auto& [outcome, count] : clean.counts) {
    for (std::int64_t k = 0; k < count; ++k) {
      ++out.counts[flip_readout(outcome, state.num_qubits(), model.p_error, rng)];
    }
  }
  return out;
}

EmpiricalDistribution noisy_circuit_sample(const StateVector& initial, const Circuit& circuit,
                                           const MeasurementBasis& basis, std::int64_t shots,
                                           const NoiseModel& model, Rng& rng) {
  validate(model);
  if (shots < 1) throw ArgumentError("shots must be >= 1");
  const int n = initial.num_qubits();

  // prefix[k]: noiseless state after the first k gates.
  std::vector<StateVector> prefix;
  prefix.reserve(circuit.size() + 1);
  prefix.push_back(initial);
  for (const auto& g : circuit) {
    prefix.push_back(prefix.back());
    apply_gate(prefix.back(), g);
  }
  const std::vector<double> clean_probs = basis_probabilities(prefix.back(), basis);

  EmpiricalDistribution out;
  out.num_qubits = n;
  out.shots = shots;
  out.basis = basis.label;

  if (!model.active()) {
    out.counts = draw_counts(clean_probs, shots, rng);
    return out;
  }

  // Gate slot s (one per gate target, in circuit order) owns event 2s (flip) and 2s+1 (reset).
  std::vector<int> first_slot;
  int slots = 0;
  for (const auto& g : circuit) {
    first_slot.push_back(slots);
    slots += static_cast<int>(g.targets().size());
  }
  std::geometric_distribution<long> gap(model.p_error);
  std::vector<char> hit(static_cast<std::size_t>(2 * slots));
  std::int64_t clean_shots = 0;
  for (std::int64_t s = 0; s < shots; ++s) {
    long first = gap(rng);
    if (first >= 2 * slots) {
      ++clean_shots;
      continue;
    }
    std::fill(hit.begin(), hit.end(), 0);
    for (long idx = first; idx < 2 * slots; idx += 1 + gap(rng)) hit[static_cast<std::size_t>(idx)] = 1;

    std::size_t gi = 0;
    while (gi + 1 < circuit.size() && 2 * first_slot[gi + 1] <= first) ++gi;
    const std::size_t start = gi;
    StateVector st = prefix[start + 1];
    for (; gi < circuit.size(); ++gi) {
      const Gate& g = circuit[gi];
      if (gi > start) apply_gate(st, g);
      const auto targets = g.targets();
      for (int channel = 0; channel < 2; ++channel) {
        for (std::size_t t = 0; t < targets.size(); ++t) {
          if (!hit[static_cast<std::size_t>(2 * (first_slot[gi] + static_cast<int>(t)) + channel)]) continue;
          if (channel == 0) {
            st.apply_x(targets[t]);
          } else {
            reset_qubit(st, targets[t], rng);
          }
        }
      }
    }
    const std::uint64_t outcome = draw_one(basis_probabilities(st, basis), rng);
    ++out.counts[flip_readout(outcome, n, model.p_error, rng)];
  }
  if (clean_shots > 0) {
    for (const auto& [outcome, count] : draw_counts(clean_probs, clean_shots, rng)) {
      for (std::int64_t k = 0; k < count; ++k) {
        ++out.counts[flip_readout(outcome, n, model.p_error, rng)];
      }
    }
  }
  return out;
}

double noisy_qkl_loss(const StateVector& initial, const Circuit& prep, const CircuitSpec& spec,
                      const ParamVector& theta, const std::vector<MeasurementBasis>& bases,
                      std::int64_t shots, double smoothing, const NoiseModel& model, Rng& rng) {
  if (bases.empty()) throw ArgumentError("QKL needs at least one basis");
  if (initial.num_qubits() != spec.num_qubits) throw ArgumentError("state and circuit sizes differ");
  Circuit full = prep;
  const Circuit ansatz = ansatz_circuit(spec, theta);
  full.insert(full.end(), ansatz.begin(), ansatz.end());
  double total = 0.0;
  for (const auto& basis : bases) {
    const auto p = noisy_circuit_sample(initial, prep, basis, shots, model, rng);
    const auto q = noisy_circuit_sample(initial, full, basis, shots, model, rng);
    total += kl_divergence(p, q, smoothing);
  }
  return total;
}

}  // namespace symlearn

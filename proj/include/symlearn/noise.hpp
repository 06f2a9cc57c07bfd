#pragma once

// Stochastic bit-flip / reset / readout errors, simulated by pure-state
// trajectories. After every elementary gate each touched qubit is flipped with
// probability p_error, then (independently) reset to |0> with probability
// p_error. Readout bits flip with probability p_error.

#include "symlearn/ansatz.hpp"
#include "symlearn/lossfn.hpp"
#include "symlearn/qsim.hpp"

#include <cstdint>
#include <vector>

namespace symlearn {

struct NoiseModel {
  double p_error = 0.0;

  bool active() const { return p_error > 0.0; }
};

void validate(const NoiseModel& model);

// Projective measurement of `qubit`, then X if the outcome was 1.
void reset_qubit(StateVector& state, int qubit, Rng& rng);

// One trajectory step: gate, bit-flip channel, reset channel.
StateVector noisy_apply(StateVector state, const Gate& gate, const NoiseModel& model, Rng& rng);
void noisy_apply_inplace(StateVector& state, const Gate& gate, const NoiseModel& model, Rng& rng);

// Born sampling followed by independent readout flips.
EmpiricalDistribution noisy_sample(const StateVector& state, const MeasurementBasis& basis,
                                   std::int64_t shots, const NoiseModel& model, Rng& rng);

// Counts from `shots` independent trajectories of `circuit` applied to `initial`,
// each measured once in `basis` with readout errors. Shots that draw no gate
// error share the noiseless output distribution.
EmpiricalDistribution noisy_circuit_sample(const StateVector& initial, const Circuit& circuit,
                                           const MeasurementBasis& basis, std::int64_t shots,
                                           const NoiseModel& model, Rng& rng);

// QKL between the noisily prepared state (initial, prep) and the same
// preparation followed by the noisy ansatz.
double noisy_qkl_loss(const StateVector& initial, const Circuit& prep, const CircuitSpec& spec,
                      const ParamVector& theta, const std::vector<MeasurementBasis>& bases,
                      std::int64_t shots, double smoothing, const NoiseModel& model, Rng& rng);

}  // namespace symlearn

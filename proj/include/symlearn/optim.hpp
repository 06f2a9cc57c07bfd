#pragma once

#include "symlearn/ansatz.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace symlearn {

using Objective = std::function<double(const ParamVector&)>;

struct NelderMeadConfig {
  double tol = 1e-12;  // stop when max - min loss over the simplex drops below this
  int max_iter = 10000;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_simplex_scale = 0.25;  // rad
  // Optional early stop once the best vertex reaches this loss.
  double target = -std::numeric_limits<double>::infinity();
};

void validate(const NelderMeadConfig& cfg);

// 1e4 iterations at L = 3 growing geometrically to 1e6 at L = 15.
int default_max_iter(int num_qubits);

enum class TerminalStatus { converged, max_iter, redirected, target_reached };
std::string to_string(TerminalStatus status);

struct PathPoint {
  ParamVector theta;
  double loss = 0.0;
};

// Best vertex after each Nelder-Mead iteration (index 0 is the initial simplex).
struct PathTranscript {
  std::vector<PathPoint> points;
  int epoch_id = 0;
  TerminalStatus status = TerminalStatus::max_iter;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  // Concatenates points and takes over the status of `other`.
  void append(const PathTranscript& other);
};

// Called once per iteration with the current best vertex; returning true
// stops the search with status `redirected`.
using IterationObserver = std::function<bool(int iteration, const ParamVector& best, double best_loss)>;

struct NelderMeadResult {
  ParamVector theta;
  double loss = 0.0;
  int iterations = 0;
  long evaluations = 0;
  // First iteration at which the best loss reached cfg.target (-1 if never).
  int iterations_to_target = -1;
  PathTranscript transcript;
};

NelderMeadResult nelder_mead_minimize(const Objective& objective, const ParamVector& start,
                                      const NelderMeadConfig& cfg,
                                      const IterationObserver& observer = {});

// Central differences, 2 * dim evaluations.
Eigen::VectorXd shift_rule_gradient(const Objective& f, const ParamVector& theta, double delta);

// theta <- theta + eta * grad f(theta), `steps` times.
ParamVector explore_ascent(const Objective& f, const ParamVector& start, double eta, int steps,
                           double delta = 1e-3);

}  // namespace symlearn

#include "symlearn/optim.hpp"

#include "symlearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace symlearn {

void validate(const NelderMeadConfig& cfg) {
  if (!(cfg.tol > 0)) throw ArgumentError("Nelder-Mead tol must be positive");
  if (cfg.max_iter < 1) throw ArgumentError("Nelder-Mead max_iter must be >= 1");
  if (!(cfg.reflection > 0) || !(cfg.expansion > 1) || !(cfg.contraction > 0 && cfg.contraction < 1) ||
      !(cfg.shrink > 0 && cfg.shrink < 1)) {
    throw ArgumentError("invalid Nelder-Mead coefficients");
  }
  if (!(cfg.initial_simplex_scale > 0)) throw ArgumentError("initial simplex scale must be positive");
}

int default_max_iter(int num_qubits) {
  const double exponent = 4.0 + 2.0 * std::max(0, num_qubits - 3) / 12.0;
  return static_cast<int>(std::lround(std::pow(10.0, exponent)));
}

std::string to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::converged: return "converged";
    case TerminalStatus::max_iter: return "max_iter";
    case TerminalStatus::redirected: return "redirected";
    case TerminalStatus::target_reached: return "target_reached";
  }
  return "unknown";
}

void PathTranscript::append(const PathTranscript& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  status = other.status;
}

namespace {

double checked(const Objective& f, const ParamVector& x, long& evaluations) {
  const double v = f(x);
  ++evaluations;
  if (!std::isfinite(v)) {
    const auto& vals = x.values();
    throw NumericalError("objective returned a non-finite value",
                         std::vector<double>(vals.data(), vals.data() + vals.size()));
  }
  return v;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const Objective& objective, const ParamVector& start,
                                      const NelderMeadConfig& cfg, const IterationObserver& observer) {
  validate(cfg);
  const int n = start.size();
  if (n < 1) throw ArgumentError("Nelder-Mead needs at least one parameter");
  if (!start.values().allFinite()) throw ArgumentError("non-finite starting point");

  NelderMeadResult result;
  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n) + 1, start.values());
  std::vector<double> f(simplex.size());
  for (int i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i) + 1][i] += cfg.initial_simplex_scale;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    f[i] = checked(objective, ParamVector(simplex[i]), result.evaluations);
  }

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> f2;
    s2.reserve(simplex.size());
    f2.reserve(simplex.size());
    for (std::size_t i : order) {
      s2.push_back(std::move(simplex[i]));
      f2.push_back(f[i]);
    }
    simplex = std::move(s2);
    f = std::move(f2);
  };

  auto record = [&] { result.transcript.points.push_back({ParamVector(simplex[0]), f[0]}); };

  sort_simplex();
  record();
  if (f[0] <= cfg.target) result.iterations_to_target = 0;

  const auto last = static_cast<std::size_t>(n);
  TerminalStatus status = TerminalStatus::max_iter;
  int iter = 0;
  while (true) {
    if (f[last] - f[0] < cfg.tol) {
      status = TerminalStatus::converged;
      break;
    }
    if (f[0] <= cfg.target) {
      status = TerminalStatus::target_reached;
      break;
    }
    if (iter >= cfg.max_iter) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < last; ++i) centroid += simplex[i];
    centroid /= n;

    const Eigen::VectorXd& worst = simplex[last];
    const Eigen::VectorXd xr = centroid + cfg.reflection * (centroid - worst);
    const double fr = checked(objective, ParamVector(xr), result.evaluations);
    bool do_shrink = false;
    if (fr < f[0]) {
      const Eigen::VectorXd xe = centroid + cfg.expansion * (xr - centroid);
      const double fe = checked(objective, ParamVector(xe), result.evaluations);
      if (fe < fr) {
        simplex[last] = xe;
        f[last] = fe;
      } else {
        simplex[last] = xr;
        f[last] = fr;
      }
    } else if (fr < f[last - 1]) {
      simplex[last] = xr;
      f[last] = fr;
    } else if (fr < f[last]) {
      const Eigen::VectorXd xc = centroid + cfg.contraction * (xr - centroid);
      const double fc = checked(objective, ParamVector(xc), result.evaluations);
      if (fc <= fr) {
        simplex[last] = xc;
        f[last] = fc;
      } else {
        do_shrink = true;
      }
    } else {
      const Eigen::VectorXd xc = centroid + cfg.contraction * (worst - centroid);
      const double fc = checked(objective, ParamVector(xc), result.evaluations);
      if (fc < f[last]) {
        simplex[last] = xc;
        f[last] = fc;
      } else {
        do_shrink = true;
      }
    }
    if (do_shrink) {
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        simplex[i] = simplex[0] + cfg.shrink * (simplex[i] - simplex[0]);
        f[i] = checked(objective, ParamVector(simplex[i]), result.evaluations);
      }
    }
    ++iter;
    sort_simplex();
    record();
    if (result.iterations_to_target < 0 && f[0] <= cfg.target) result.iterations_to_target = iter;
    if (observer && observer(iter, result.transcript.points.back().theta, f[0])) {
      status = TerminalStatus::redirected;
      break;
    }
  }
  if (status == TerminalStatus::max_iter && f[last] - f[0] < cfg.tol) status = TerminalStatus::converged;

  result.theta = ParamVector(simplex[0]);
  result.loss = f[0];
  result.iterations = iter;
  result.transcript.status = status;
  return result;
}

Eigen::VectorXd shift_rule_gradient(const Objective& f, const ParamVector& theta, double delta) {
  if (!(delta > 0)) throw ArgumentError("finite-difference step must be positive");
  Eigen::VectorXd grad(theta.size());
  ParamVector probe = theta;
  long evals = 0;
  for (int i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + delta;
    const double up = checked(f, probe, evals);
    probe[i] = theta[i] - delta;
    const double down = checked(f, probe, evals);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2 * delta);
  }
  return grad;
}

ParamVector explore_ascent(const Objective& f, const ParamVector& start, double eta, int steps,
                           double delta) {
  if (steps < 1) throw ArgumentError("exploration needs steps >= 1");
  if (!(eta > 0)) throw ArgumentError("exploration learning rate must be positive");
  ParamVector theta = start;
  for (int s = 0; s < steps; ++s) theta.values() += eta * shift_rule_gradient(f, theta, delta);
  return theta;
}

}  // namespace symlearn

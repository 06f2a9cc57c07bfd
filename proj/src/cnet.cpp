#include "symlearn/cnet.hpp"

#include "symlearn/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace symlearn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd leaky(const MatrixXd& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0 ? v : slope * v; });
}

MatrixXd leaky_grad(const MatrixXd& pre, const MatrixXd& upstream, double slope) {
  return upstream.binaryExpr(pre, [slope](double g, double v) { return v > 0 ? g : slope * g; });
}

template <typename F>
void for_each_tensor(CNetWeights& w, F&& f) {
  f(w.w1); f(w.b1); f(w.w2); f(w.b2); f(w.w3); f(w.b3); f(w.w4); f(w.b4); f(w.w5); f(w.b5);
}

template <typename F>
void for_each_tensor(const CNetWeights& w, F&& f) {
  f(w.w1); f(w.b1); f(w.w2); f(w.b2); f(w.w3); f(w.b3); f(w.w4); f(w.b4); f(w.w5); f(w.b5);
}

struct Activations {
  MatrixXd x3;            // 3 x (P*B)
  MatrixXd h1_pre, h1;    // c1 x (P*B)
  MatrixXd h2_pre, h2;    // c2 x (P*B)
  MatrixXd a3, z3, a4, z4;
  Eigen::RowVectorXd out;
};

void check_input(const CNetArchitecture& arch, const MatrixXd& inputs) {
  if (inputs.rows() != arch.input_dim()) {
    throw ArgumentError("CNet expects " + std::to_string(arch.input_dim()) +
                        " inputs per sample, got " + std::to_string(inputs.rows()));
  }
}

Activations run_forward(const CNetArchitecture& arch, const CNetWeights& w, const MatrixXd& inputs) {
  const Eigen::Index batch = inputs.cols();
  const Eigen::Index p = arch.positions();
  const double s = arch.leaky_slope;
  Activations a;
  if (arch.input == CNetInput::periodic) {
    a.x3.resize(6, p * batch);
    const Eigen::Map<const MatrixXd> raw(inputs.data(), 3, p * batch);
    for (Eigen::Index k = 0; k < 3; ++k) {
      a.x3.row(2 * k) = raw.row(k).array().cos().matrix();
      a.x3.row(2 * k + 1) = raw.row(k).array().sin().matrix();
    }
  } else {
    a.x3 = Eigen::Map<const MatrixXd>(inputs.data(), 3, p * batch);
  }
  a.h1_pre = (w.w1 * a.x3).colwise() + w.b1;
  a.h1 = leaky(a.h1_pre, s);
  a.h2_pre = (w.w2 * a.h1).colwise() + w.b2;
  a.h2 = leaky(a.h2_pre, s);
  const Eigen::Map<const MatrixXd> flat(a.h2.data(), arch.conv2_channels * p, batch);
  a.a3 = (w.w3 * flat).colwise() + w.b3;
  a.z3 = leaky(a.a3, s);
  a.a4 = (w.w4 * a.z3).colwise() + w.b4;
  a.z4 = leaky(a.a4, s);
  a.out = (w.w5 * a.z4).array() + w.b5[0];
  return a;
}

}  // namespace

std::string to_string(CNetInput input) { return input == CNetInput::periodic ? "periodic" : "raw"; }

CNetInput cnet_input_from_string(const std::string& name) {
  if (name == "raw") return CNetInput::raw;
  if (name == "periodic") return CNetInput::periodic;
  throw ArgumentError("unknown CNet input map '" + name + "'");
}

CNetArchitecture cnet_architecture(const CircuitSpec& spec, CNetInput input) {
  CNetArchitecture arch;
  arch.num_qubits = spec.num_qubits;
  arch.block_depth = spec.block_depth;
  arch.input = input;
  return arch;
}

CNetWeights CNetWeights::zeros(const CNetArchitecture& arch) {
  CNetWeights w;
  const int flat = arch.conv2_channels * arch.positions();
  w.w1 = MatrixXd::Zero(arch.conv1_channels, arch.kernel_width());
  w.b1 = VectorXd::Zero(arch.conv1_channels);
  w.w2 = MatrixXd::Zero(arch.conv2_channels, arch.conv1_channels);
  w.b2 = VectorXd::Zero(arch.conv2_channels);
  w.w3 = MatrixXd::Zero(arch.hidden, flat);
  w.b3 = VectorXd::Zero(arch.hidden);
  w.w4 = MatrixXd::Zero(arch.hidden, arch.hidden);
  w.b4 = VectorXd::Zero(arch.hidden);
  w.w5 = MatrixXd::Zero(1, arch.hidden);
  w.b5 = VectorXd::Zero(1);
  return w;
}

long CNetWeights::size() const {
  long n = 0;
  for_each_tensor(*this, [&](const auto& t) { n += static_cast<long>(t.size()); });
  return n;
}

Eigen::VectorXd CNetWeights::flatten() const {
  VectorXd flat(size());
  Eigen::Index offset = 0;
  for_each_tensor(*this, [&](const auto& t) {
    flat.segment(offset, t.size()) = Eigen::Map<const VectorXd>(t.data(), t.size());
    offset += t.size();
  });
  return flat;
}

void CNetWeights::assign(const Eigen::VectorXd& flat) {
  if (flat.size() != size()) throw ArgumentError("flat weight vector has the wrong length");
  Eigen::Index offset = 0;
  for_each_tensor(*this, [&](auto& t) {
    Eigen::Map<VectorXd>(t.data(), t.size()) = flat.segment(offset, t.size());
    offset += t.size();
  });
}

void CNetWeights::axpy(double scale, const CNetWeights& o) {
  w1 += scale * o.w1; b1 += scale * o.b1;
  w2 += scale * o.w2; b2 += scale * o.b2;
  w3 += scale * o.w3; b3 += scale * o.b3;
  w4 += scale * o.w4; b4 += scale * o.b4;
  w5 += scale * o.w5; b5 += scale * o.b5;
}

CNetModel::CNetModel(const CNetArchitecture& arch) : arch_(arch), weights_(CNetWeights::zeros(arch)) {
  if (arch.num_qubits < 1 || arch.block_depth < 0 || arch.conv1_channels < 1 ||
      arch.conv2_channels < 1 || arch.hidden < 1) {
    throw ArgumentError("invalid CNet architecture");
  }
}

double CNetModel::forward(const ParamVector& theta) const {
  const Eigen::Map<const MatrixXd> col(theta.values().data(), theta.size(), 1);
  check_input(arch_, col);
  return run_forward(arch_, weights_, col).out[0];
}

Eigen::VectorXd CNetModel::forward_batch(const Eigen::MatrixXd& inputs) const {
  check_input(arch_, inputs);
  return run_forward(arch_, weights_, inputs).out.transpose();
}

double CNetModel::mse_and_gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                   CNetWeights* grad) const {
  check_input(arch_, inputs);
  const Eigen::Index batch = inputs.cols();
  if (targets.size() != batch) throw ArgumentError("target count does not match the batch");
  const Activations a = run_forward(arch_, weights_, inputs);
  const Eigen::RowVectorXd err = a.out - targets.transpose();
  const double mse = err.squaredNorm() / static_cast<double>(batch);
  if (!grad) return mse;

  const double s = arch_.leaky_slope;
  const Eigen::Index p = arch_.positions();
  const auto& w = weights_;
  CNetWeights& g = *grad;
  const Eigen::RowVectorXd dout = (2.0 / static_cast<double>(batch)) * err;

  g.w5 = dout * a.z4.transpose();
  g.b5 = VectorXd::Constant(1, dout.sum());
  const MatrixXd da4 = leaky_grad(a.a4, w.w5.transpose() * dout, s);
  g.w4 = da4 * a.z3.transpose();
  g.b4 = da4.rowwise().sum();
  const MatrixXd da3 = leaky_grad(a.a3, w.w4.transpose() * da4, s);
  const Eigen::Map<const MatrixXd> flat(a.h2.data(), arch_.conv2_channels * p, batch);
  g.w3 = da3 * flat.transpose();
  g.b3 = da3.rowwise().sum();
  const MatrixXd dflat = w.w3.transpose() * da3;
  const Eigen::Map<const MatrixXd> dh2(dflat.data(), arch_.conv2_channels, p * batch);
  const MatrixXd dh2_pre = leaky_grad(a.h2_pre, dh2, s);
  g.w2 = dh2_pre * a.h1.transpose();
  g.b2 = dh2_pre.rowwise().sum();
  const MatrixXd dh1_pre = leaky_grad(a.h1_pre, w.w2.transpose() * dh2_pre, s);
  g.w1 = dh1_pre * a.x3.transpose();
  g.b1 = dh1_pre.rowwise().sum();
  return mse;
}

CNetModel cnet_init(const CircuitSpec& spec, std::uint64_t seed, CNetInput input) {
  return cnet_init(cnet_architecture(spec, input), seed);
}

CNetModel cnet_init(const CNetArchitecture& arch, std::uint64_t seed) {
  CNetModel model(arch);
  Rng rng(seed);
  auto fill = [&](auto& t, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = unif(rng);
  };
  auto& w = model.weights();
  const int flat = arch.conv2_channels * arch.positions();
  fill(w.w1, arch.kernel_width()); fill(w.b1, arch.kernel_width());
  fill(w.w2, arch.conv1_channels); fill(w.b2, arch.conv1_channels);
  fill(w.w3, flat); fill(w.b3, flat);
  fill(w.w4, arch.hidden); fill(w.b4, arch.hidden);
  fill(w.w5, arch.hidden); fill(w.b5, arch.hidden);
  return model;
}

double cnet_forward(const CNetModel& model, const ParamVector& theta) { return model.forward(theta); }

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0)) throw ArgumentError("learning rate must be positive");
  if (cfg.batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (cfg.epochs_per_path < 1) throw ArgumentError("epochs_per_path must be >= 1");
  if (cfg.momentum < 0 || cfg.momentum >= 1) throw ArgumentError("momentum must be in [0, 1)");
}

namespace {

MatrixXd stack_inputs(const std::vector<ParamVector>& inputs, int dim) {
  MatrixXd x(dim, static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != dim) throw ArgumentError("training input has the wrong dimension");
    x.col(static_cast<Eigen::Index>(i)) = inputs[i].values();
  }
  return x;
}

}  // namespace

double cnet_mse(const CNetModel& model, const std::vector<ParamVector>& inputs,
                const std::vector<double>& targets) {
  if (inputs.empty()) throw ArgumentError("empty dataset");
  const MatrixXd x = stack_inputs(inputs, model.architecture().input_dim());
  const VectorXd y = Eigen::Map<const VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
  return model.mse_and_gradient(x, y, nullptr);
}

TrainSummary cnet_train(CNetModel& model, const std::vector<ParamVector>& inputs,
                        const std::vector<double>& targets, const TrainConfig& cfg) {
  validate(cfg);
  if (inputs.empty()) throw ArgumentError("cannot train on an empty transcript");
  if (inputs.size() != targets.size()) throw ArgumentError("inputs and targets differ in length");
  const MatrixXd x = stack_inputs(inputs, model.architecture().input_dim());
  const VectorXd y = Eigen::Map<const VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
  const auto n = static_cast<Eigen::Index>(inputs.size());

  TrainSummary summary;
  summary.initial_mse = model.mse_and_gradient(x, y, nullptr);

  Rng rng(cfg.shuffle_seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(model.trained_paths() + 1)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  CNetWeights grad = CNetWeights::zeros(model.architecture());
  CNetWeights velocity = CNetWeights::zeros(model.architecture());
  MatrixXd bx;
  VectorXd by;
  for (int epoch = 0; epoch < cfg.epochs_per_path; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index len = std::min<Eigen::Index>(cfg.batch_size, n - start);
      bx.resize(x.rows(), len);
      by.resize(len);
      for (Eigen::Index j = 0; j < len; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
        bx.col(j) = x.col(src);
        by[j] = y[src];
      }
      model.mse_and_gradient(bx, by, &grad);
      if (cfg.momentum > 0) {
        velocity.axpy(cfg.momentum - 1.0, velocity);  // v <- momentum * v
        velocity.axpy(1.0, grad);
        model.weights().axpy(-cfg.learning_rate, velocity);
      } else {
        model.weights().axpy(-cfg.learning_rate, grad);
      }
    }
    summary.epoch_mse.push_back(model.mse_and_gradient(x, y, nullptr));
  }
  summary.final_mse = summary.epoch_mse.back();
  if (!std::isfinite(summary.final_mse)) throw NumericalError("CNet training diverged");
  model.mark_trained();
  return summary;
}

TrainSummary cnet_train_path(CNetModel& model, const PathTranscript& transcript,
                             const TrainConfig& cfg) {
  if (transcript.empty()) throw ArgumentError("cannot train on an empty transcript");
  std::vector<ParamVector> inputs;
  std::vector<double> targets;
  inputs.reserve(transcript.size());
  targets.reserve(transcript.size());
  for (const auto& pt : transcript.points) {
    inputs.push_back(pt.theta);
    targets.push_back(pt.loss);
  }
  return cnet_train(model, inputs, targets, cfg);
}

double cnet_estimation_error(const CNetModel& model, const ParamVector& theta, double true_loss) {
  const double e = true_loss - model.forward(theta);
  return e * e;
}

// ---- checkpoint -------------------------------------------------------------

std::string cnet_to_json(const CNetModel& model) {
  using nlohmann::json;
  const auto& a = model.architecture();
  json j;
  j["format"] = "symlearn-cnet";
  j["version"] = 1;
  j["architecture"] = {{"num_qubits", a.num_qubits},         {"block_depth", a.block_depth},
                       {"conv1_channels", a.conv1_channels}, {"conv2_channels", a.conv2_channels},
                       {"hidden", a.hidden},                 {"leaky_slope", a.leaky_slope},
                       {"input", to_string(a.input)}};
  j["trained_paths"] = model.trained_paths();
  const VectorXd flat = model.weights().flatten();
  j["weights"] = std::vector<double>(flat.data(), flat.data() + flat.size());
  return j.dump();
}

CNetModel cnet_from_json(const std::string& text) {
  using nlohmann::json;
  const json j = json::parse(text);
  if (j.value("format", "") != "symlearn-cnet") throw ArgumentError("not a CNet checkpoint");
  if (j.value("version", 0) != 1) throw ArgumentError("unsupported CNet checkpoint version");
  const auto& ja = j.at("architecture");
  CNetArchitecture a;
  a.num_qubits = ja.at("num_qubits").get<int>();
  a.block_depth = ja.at("block_depth").get<int>();
  a.conv1_channels = ja.at("conv1_channels").get<int>();
  a.conv2_channels = ja.at("conv2_channels").get<int>();
  a.hidden = ja.at("hidden").get<int>();
  a.leaky_slope = ja.at("leaky_slope").get<double>();
  a.input = cnet_input_from_string(ja.value("input", std::string("raw")));
  CNetModel model(a);
  const auto flat = j.at("weights").get<std::vector<double>>();
  model.weights().assign(Eigen::Map<const VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size())));
  for (int i = 0; i < j.value("trained_paths", 0); ++i) model.mark_trained();
  return model;
}

}  // namespace symlearn

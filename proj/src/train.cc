// src/train.cc

// Copyright 2026  The drnmf authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "drnmf/train.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "drnmf/common.h"

namespace drnmf {

void Gradients::set_zero_like(const DrNmfParams& p) {
  W_log.assign(p.W_log.size(), Eigen::MatrixXd());
  for (size_t k = 0; k < p.W_log.size(); ++k)
    W_log[k] = Eigen::MatrixXd::Zero(p.W_log[k].rows(), p.W_log[k].cols());
  alpha_log = Eigen::VectorXd::Zero(p.alpha_log.size());
  h0_log = Eigen::VectorXd::Zero(p.h0_log.size());
}

void Gradients::accumulate(const Gradients& other, double scale) {
  for (size_t k = 0; k < W_log.size(); ++k) W_log[k] += scale * other.W_log[k];
  alpha_log += scale * other.alpha_log;
  h0_log += scale * other.h0_log;
}

BackwardResult backward(const DrNmfParams& p, const Eigen::MatrixXd& X,
                        const Eigen::MatrixXd& Y, const ForwardTrace& trace,
                        const BackwardOptions& opts) {
  const int K = p.num_layers();
  const int N = p.num_basis();
  const int T = static_cast<int>(X.cols());
  if (static_cast<int>(trace.states.size()) != T ||
      trace.H.cols() != T || trace.H.rows() != N)
    throw std::invalid_argument("backward: trace does not match inputs");
  if (Y.rows() != X.rows() || Y.cols() != X.cols())
    throw std::invalid_argument("backward: target shape mismatch");

  BackwardResult res;
  res.loss = signal_approx_loss(Y, X, trace.mask);

  // Gradients with respect to the realized weights.
  std::vector<Eigen::MatrixXd> dW(K);
  for (int k = 0; k < K; ++k)
    dW[k] = Eigen::MatrixXd::Zero(X.rows(), N);
  Eigen::VectorXd d_alpha = Eigen::VectorXd::Zero(K);

  // Loss -> mask -> speech/noise estimates.
  const Eigen::ArrayXXd P = trace.y_hat.array() + 0.5 * p.epsilon_mask;
  const Eigen::ArrayXXd D =
      trace.y_hat.array() + trace.v_hat.array() + p.epsilon_mask;
  const Eigen::ArrayXXd dQ = 2.0 * (trace.output.array() - Y.array());
  const Eigen::ArrayXXd dM = dQ * X.array();
  const Eigen::MatrixXd dY_hat = (dM * (D - P) / (D * D)).matrix();
  const Eigen::MatrixXd dV_hat = (-dM * P / (D * D)).matrix();

  const Eigen::MatrixXd& W_last = trace.weights.W[K - 1];
  dW[K - 1].leftCols(p.n_speech) +=
      dY_hat * trace.H.topRows(p.n_speech).transpose();
  dW[K - 1].rightCols(p.n_noise) +=
      dV_hat * trace.H.bottomRows(p.n_noise).transpose();

  Eigen::MatrixXd dH(N, T);
  dH.topRows(p.n_speech) =
      W_last.leftCols(p.n_speech).transpose() * dY_hat;
  dH.bottomRows(p.n_noise) =
      W_last.rightCols(p.n_noise).transpose() * dV_hat;

  // Through the unfolded recurrence, frames backwards, layers backwards.
  const double data_term_sign = opts.corrupt_alpha_term ? -1.0 : 1.0;
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd g(N), gz(N), r(X.rows()), w1(X.rows());
  for (int t = T - 1; t >= 0; --t) {
    g = dH.col(t) + carry;
    for (int k = K - 1; k >= 0; --k) {
      const Eigen::MatrixXd& W = trace.weights.W[k];
      const double alpha = trace.weights.alpha[k];
      const double inv_alpha = 1.0 / alpha;
      const auto h_prev = trace.states[t].col(k);
      const auto h_cur = trace.states[t].col(k + 1);

      for (int i = 0; i < N; ++i) gz[i] = h_cur[i] > 0.0 ? g[i] : 0.0;
      r.noalias() = X.col(t) - W * h_prev;
      w1.noalias() = W * gz;

      d_alpha[k] += (p.lambda1 * gz.sum() - data_term_sign * w1.dot(r)) *
                    inv_alpha * inv_alpha;
      dW[k].noalias() += inv_alpha * (r * gz.transpose());
      dW[k].noalias() -= inv_alpha * (w1 * h_prev.transpose());
      g = gz - inv_alpha * (W.transpose() * w1);
    }
    carry = g;
  }
  const Eigen::VectorXd d_h0 = carry;

  // Chain through exp and the column normalization into the log domain.
  res.grad.set_zero_like(p);
  for (int k = 0; k < K; ++k) {
    const Eigen::MatrixXd& W = trace.weights.W[k];
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      const double radial = W.col(j).dot(dW[k].col(j));
      res.grad.W_log[k].col(j) =
          (dW[k].col(j) - radial * W.col(j)).cwiseProduct(W.col(j));
    }
  }
  res.grad.alpha_log =
      d_alpha.cwiseProduct(trace.weights.alpha);
  res.grad.h0_log = d_h0.cwiseProduct(trace.weights.h0);
  return res;
}

AdamState make_adam_state(const DrNmfParams& p, const AdamConfig& cfg) {
  AdamState s;
  s.config = cfg;
  s.m_W.assign(p.W_log.size(), Eigen::MatrixXd());
  s.v_W.assign(p.W_log.size(), Eigen::MatrixXd());
  for (size_t k = 0; k < p.W_log.size(); ++k) {
    s.m_W[k] = Eigen::MatrixXd::Zero(p.W_log[k].rows(), p.W_log[k].cols());
    s.v_W[k] = Eigen::MatrixXd::Zero(p.W_log[k].rows(), p.W_log[k].cols());
  }
  s.m_alpha = Eigen::VectorXd::Zero(p.alpha_log.size());
  s.v_alpha = Eigen::VectorXd::Zero(p.alpha_log.size());
  s.m_h0 = Eigen::VectorXd::Zero(p.h0_log.size());
  s.v_h0 = Eigen::VectorXd::Zero(p.h0_log.size());
  return s;
}

namespace {

template <typename T>
void adam_update(const AdamConfig& cfg, long step, T& m, T& v, T& param,
                 const T& grad) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  param.array() -= cfg.learning_rate * (m.array() / c1) /
                   ((v.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(AdamState& state, DrNmfParams& p, const Gradients& g) {
  if (g.W_log.size() != p.W_log.size())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  ++state.step;
  for (size_t k = 0; k < p.W_log.size(); ++k)
    adam_update(state.config, state.step, state.m_W[k], state.v_W[k],
                p.W_log[k], g.W_log[k]);
  adam_update(state.config, state.step, state.m_alpha, state.v_alpha,
              p.alpha_log, g.alpha_log);
  adam_update(state.config, state.step, state.m_h0, state.v_h0, p.h0_log,
              g.h0_log);
}

std::vector<SupervisedExample> split_sequence(const Eigen::MatrixXd& X,
                                              const Eigen::MatrixXd& Y,
                                              int max_frames) {
  if (X.cols() != Y.cols() || X.rows() != Y.rows())
    throw std::invalid_argument("split_sequence: shape mismatch");
  if (max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
  std::vector<SupervisedExample> out;
  for (Eigen::Index at = 0; at < X.cols(); at += max_frames) {
    const Eigen::Index n = std::min<Eigen::Index>(max_frames, X.cols() - at);
    out.push_back({X.middleCols(at, n), Y.middleCols(at, n)});
  }
  return out;
}

double mean_loss(const DrNmfParams& p,
                 const std::vector<SupervisedExample>& set) {
  if (set.empty()) throw std::invalid_argument("mean_loss: empty dataset");
  double total = 0.0;
  for (const auto& ex : set) {
    const ForwardTrace trace = forward(p, ex.X);
    total += signal_approx_loss(ex.Y, ex.X, trace.mask);
  }
  return total / static_cast<double>(set.size());
}

TrainResult train_loop(const DrNmfParams& init,
                       const std::vector<SupervisedExample>& train_set,
                       const std::vector<SupervisedExample>& val_set,
                       const TrainConfig& cfg) {
  if (train_set.empty() || val_set.empty())
    throw std::invalid_argument("train_loop: empty dataset");
  for (const auto& ex : train_set)
    if (ex.X.cols() > cfg.max_seq_frames)
      throw std::invalid_argument(
          "train_loop: sequence longer than max_seq_frames; split it first");

  TrainResult res;
  res.best_params = init;
  if (cfg.max_epochs == 0) {
    res.best_val_loss = std::numeric_limits<double>::quiet_NaN();
    return res;
  }

  using clock = std::chrono::steady_clock;
  auto record_epoch = [&](int epoch, double train_loss, double val_loss,
                          clock::time_point t0) {
    const double secs =
        std::chrono::duration<double>(clock::now() - t0).count();
    res.history.push_back({epoch, train_loss, val_loss, secs});
    if (cfg.progress) cfg.progress(res.history.back());
  };

  auto t0 = clock::now();
  DrNmfParams params = init;
  record_epoch(0, mean_loss(params, train_set), mean_loss(params, val_set), t0);
  res.best_val_loss = res.history.back().val_loss;
  res.best_epoch = 0;

  AdamState adam = make_adam_state(params, cfg.adam);
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  int since_improve = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    t0 = clock::now();
    std::mt19937_64 rng(cfg.shuffle_seed + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);

    double train_total = 0.0;
    Gradients batch_grad;
    for (size_t at = 0; at < order.size(); at += cfg.batch_size) {
      const size_t batch_end =
          std::min(order.size(), at + static_cast<size_t>(cfg.batch_size));
      batch_grad.set_zero_like(params);
      const double inv_batch = 1.0 / static_cast<double>(batch_end - at);
      for (size_t i = at; i < batch_end; ++i) {
        const SupervisedExample& ex = train_set[order[i]];
        const ForwardTrace trace = forward(params, ex.X);
        const BackwardResult bw = backward(params, ex.X, ex.Y, trace);
        train_total += bw.loss;
        batch_grad.accumulate(bw.grad, inv_batch);
      }
      adam_step(adam, params, batch_grad);
    }

    const double train_loss = train_total / static_cast<double>(order.size());
    const double val_loss = mean_loss(params, val_set);
    record_epoch(epoch, train_loss, val_loss, t0);

    if (val_loss < res.best_val_loss) {
      res.best_val_loss = val_loss;
      res.best_epoch = epoch;
      res.best_params = params;
      since_improve = 0;
    } else {
      ++since_improve;
    }
    if (since_improve >= cfg.patience_epochs) break;
  }
  return res;
}

void write_history_csv(const std::string& path,
                       const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "epoch,train_loss,val_loss,seconds\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.3f\n", r.epoch,
                  r.train_loss, r.val_loss, r.seconds);
    out << buf;
  }
  if (!out) throw IoError(path + ": write failed");
}

DrNmfParams initialize_from_snmf(const Dictionary& dict, double lambda1, int K,
                                 double alpha0, double h0_const,
                                 double epsilon_log, double epsilon_mask) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  DrNmfParams p;
  const Eigen::MatrixXd W_log = (dict.W.array() + epsilon_log).log();
  p.W_log.assign(K, W_log);
  p.alpha_log =
      Eigen::VectorXd::Constant(K, std::log(epsilon_log + alpha0));
  p.h0_log = Eigen::VectorXd::Constant(dict.size(),
                                       std::log(epsilon_log + h0_const));
  p.lambda1 = lambda1;
  p.n_speech = dict.n_speech;
  p.n_noise = dict.n_noise;
  p.epsilon_log = epsilon_log;
  p.epsilon_mask = epsilon_mask;
  return p;
}

GradCheckReport gradient_check(const DrNmfParams& p, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd& Y, int probes_per_tensor,
                               std::uint64_t seed, double fd_step,
                               const BackwardOptions& opts) {
  const ForwardTrace trace = forward(p, X);
  const BackwardResult bw = backward(p, X, Y, trace, opts);

  std::mt19937_64 rng(seed);
  auto loss_at = [&](const DrNmfParams& q) {
    return signal_approx_loss(Y, X, forward(q, X).mask);
  };

  GradCheckReport report;
  auto probe_tensor = [&](const std::string& name, Eigen::Index size,
                          auto get_coord, auto nudge) {
    GradCheckTensor tr;
    tr.name = name;
    std::vector<Eigen::Index> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    if (static_cast<int>(size) > probes_per_tensor) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(probes_per_tensor);
    }
    for (Eigen::Index i : idx) {
      DrNmfParams plus = p;
      nudge(plus, i, fd_step);
      DrNmfParams minus = p;
      nudge(minus, i, -fd_step);
      const double numeric =
          (loss_at(plus) - loss_at(minus)) / (2.0 * fd_step);
      const double analytic = get_coord(i);
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      if (rel >= tr.max_rel_err) {
        tr.max_rel_err = rel;
        tr.worst_coord = std::to_string(i);
        tr.analytic = analytic;
        tr.numeric = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, tr.max_rel_err);
    report.tensors.push_back(std::move(tr));
  };

  for (int k = 0; k < p.num_layers(); ++k) {
    probe_tensor(
        "W_log_" + std::to_string(k + 1), p.W_log[k].size(),
        [&](Eigen::Index i) { return bw.grad.W_log[k](i); },
        [k](DrNmfParams& q, Eigen::Index i, double d) { q.W_log[k](i) += d; });
  }
  probe_tensor(
      "alpha_log", p.alpha_log.size(),
      [&](Eigen::Index i) { return bw.grad.alpha_log(i); },
      [](DrNmfParams& q, Eigen::Index i, double d) { q.alpha_log(i) += d; });
  probe_tensor(
      "h0_log", p.h0_log.size(),
      [&](Eigen::Index i) { return bw.grad.h0_log(i); },
      [](DrNmfParams& q, Eigen::Index i, double d) { q.h0_log(i) += d; });
  return report;
}

}  // namespace drnmf

// src/snmf.cc

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

#include "drnmf/snmf.h"

#include <random>
#include <stdexcept>

#include "drnmf/common.h"

namespace drnmf {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite())
    throw NumericError(std::string("mu_step: non-finite values in ") + what);
}

void normalize_columns(Eigen::MatrixXd& W) {
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    const double n = W.col(j).norm();
    if (n > 0.0) W.col(j) /= n;
  }
}

Eigen::MatrixXd concat_cols(const std::vector<Eigen::MatrixXd>& mats) {
  if (mats.empty()) throw std::invalid_argument("empty corpus");
  const Eigen::Index rows = mats.front().rows();
  Eigen::Index cols = 0;
  for (const auto& m : mats) {
    if (m.rows() != rows)
      throw std::invalid_argument("spectrogram bin counts differ across corpus");
    cols += m.cols();
  }
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& m : mats) {
    out.middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  return out;
}

}  // namespace

double snmf_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                      const Eigen::MatrixXd& H, double lambda1) {
  if (W.rows() != X.rows() || W.cols() != H.rows() || H.cols() != X.cols())
    throw std::invalid_argument("snmf_objective: shape mismatch");
  const double fit = 0.5 * (X - W * H).squaredNorm();
  return fit + lambda1 * H.sum();
}

void mu_update_h(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                 Eigen::MatrixXd& H, double lambda1, double epsilon_mu) {
  const Eigen::MatrixXd num = W.transpose() * X;
  const Eigen::MatrixXd den = W.transpose() * (W * H);
  H.array() *= num.array() / (den.array() + lambda1 + epsilon_mu);
}

void mu_step(const Eigen::MatrixXd& X, Eigen::MatrixXd& W, Eigen::MatrixXd& H,
             double lambda1, double epsilon_mu,
             const std::vector<bool>& update_cols) {
  if (W.rows() != X.rows() || W.cols() != H.rows() || H.cols() != X.cols())
    throw std::invalid_argument("mu_step: shape mismatch");
  if (!update_cols.empty() &&
      update_cols.size() != static_cast<size_t>(W.cols()))
    throw std::invalid_argument("mu_step: mask size mismatch");

  mu_update_h(X, W, H, lambda1, epsilon_mu);
  check_finite(H, "H");

  bool any_update = update_cols.empty();
  for (bool b : update_cols) any_update = any_update || b;
  if (!any_update) return;

  const Eigen::MatrixXd frozen = W;

  // Unit-norm-aware update: the correction terms project the step onto the
  // tangent of the column-norm constraint so renormalization keeps descent.
  const Eigen::MatrixXd XHt = X * H.transpose();
  const Eigen::MatrixXd WHHt = W * (H * H.transpose());
  const Eigen::RowVectorXd a = (WHHt.array() * W.array()).colwise().sum();
  const Eigen::RowVectorXd b = (XHt.array() * W.array()).colwise().sum();
  const Eigen::MatrixXd num =
      XHt.array() + W.array().rowwise() * a.array();
  const Eigen::MatrixXd den =
      WHHt.array() + (W.array().rowwise() * b.array()) + epsilon_mu;
  W.array() *= num.array() / den.array();
  normalize_columns(W);
  check_finite(W, "W");

  if (!update_cols.empty()) {
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      if (!update_cols[static_cast<size_t>(j)]) W.col(j) = frozen.col(j);
  }
}

Eigen::MatrixXd random_dictionary(int n_bins, int n_cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd W(n_bins, n_cols);
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = uni(rng);
  normalize_columns(W);
  return W;
}

Eigen::MatrixXd random_activations(int n_cols, int n_frames,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd H(n_cols, n_frames);
  for (Eigen::Index j = 0; j < H.cols(); ++j)
    for (Eigen::Index i = 0; i < H.rows(); ++i) H(i, j) = uni(rng);
  return H;
}

namespace {

Dictionary run_training(const Eigen::MatrixXd& X, Eigen::MatrixXd W,
                        int n_speech, int n_noise,
                        const std::vector<bool>& update_cols,
                        const SnmfConfig& cfg) {
  Eigen::MatrixXd H =
      random_activations(static_cast<int>(W.cols()),
                         static_cast<int>(X.cols()), cfg.seed);
  for (int it = 1; it <= cfg.n_iters; ++it) {
    mu_step(X, W, H, cfg.lambda1, cfg.epsilon_mu, update_cols);
    if (cfg.progress && cfg.progress_every > 0 &&
        (it % cfg.progress_every == 0 || it == cfg.n_iters))
      cfg.progress(it, snmf_objective(X, W, H, cfg.lambda1));
  }
  return Dictionary{std::move(W), n_speech, n_noise};
}

}  // namespace

Dictionary train_speech_dict(const std::vector<Eigen::MatrixXd>& clean_mags,
                             int n_speech, const SnmfConfig& cfg) {
  if (n_speech < 1) throw std::invalid_argument("n_speech must be >= 1");
  const Eigen::MatrixXd X = concat_cols(clean_mags);
  Eigen::MatrixXd W =
      random_dictionary(static_cast<int>(X.rows()), n_speech, cfg.seed);
  return run_training(X, std::move(W), n_speech, 0, {}, cfg);
}

Dictionary train_noise_dict(const std::vector<Eigen::MatrixXd>& noisy_mags,
                            const Dictionary& speech, int n_noise,
                            const SnmfConfig& cfg) {
  if (n_noise < 0) throw std::invalid_argument("n_noise must be >= 0");
  if (n_noise == 0) return speech;
  const Eigen::MatrixXd X = concat_cols(noisy_mags);
  const int n_speech = speech.size();
  Eigen::MatrixXd W(X.rows(), n_speech + n_noise);
  W.leftCols(n_speech) = speech.W;
  W.rightCols(n_noise) = random_dictionary(static_cast<int>(X.rows()), n_noise,
                                           cfg.seed ^ 0xda3e39cb94b95bdbULL);
  std::vector<bool> update_cols(n_speech + n_noise, true);
  for (int j = 0; j < n_speech; ++j) update_cols[j] = false;
  return run_training(X, std::move(W), n_speech, n_noise, update_cols, cfg);
}

Eigen::MatrixXd infer_h_mu(const Eigen::MatrixXd& X, const Dictionary& dict,
                           const SnmfConfig& cfg) {
  if (dict.W.rows() != X.rows())
    throw std::invalid_argument("infer_h_mu: bin count mismatch");
  Eigen::MatrixXd H = random_activations(
      dict.size(), static_cast<int>(X.cols()), cfg.seed);
  for (int it = 0; it < cfg.n_iters; ++it) {
    mu_update_h(X, dict.W, H, cfg.lambda1, cfg.epsilon_mu);
    check_finite(H, "H");
  }
  return H;
}

}  // namespace drnmf

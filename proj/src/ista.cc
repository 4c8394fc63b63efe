// src/ista.cc

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

#include "drnmf/ista.h"

#include <cmath>
#include <stdexcept>

namespace drnmf {

double soft_threshold(double z, double b, bool nonnegative) {
  if (nonnegative) return std::max(z - b, 0.0);
  if (z > b) return z - b;
  if (z < -b) return z + b;
  return 0.0;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& z, double b,
                               bool nonnegative) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    out[i] = soft_threshold(z[i], b, nonnegative);
  return out;
}

LayerOperator make_layer_operator(const Eigen::MatrixXd& W,
                                  const Eigen::MatrixXd& X, double alpha,
                                  double lambda1, bool nonnegative) {
  if (W.rows() != X.rows())
    throw std::invalid_argument("layer operator: dictionary/input bin mismatch");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  LayerOperator op;
  op.gram = W.transpose() * W;
  op.wtx = W.transpose() * X;
  op.inv_alpha = 1.0 / alpha;
  op.threshold = lambda1 / alpha;
  op.nonnegative = nonnegative;
  return op;
}

Eigen::VectorXd layer_step(const LayerOperator& op, const Eigen::VectorXd& h,
                           int frame) {
  Eigen::VectorXd z = op.gram * h;
  z -= op.wtx.col(frame);
  z = h - op.inv_alpha * z;
  return soft_threshold(z, op.threshold, op.nonnegative);
}

Eigen::MatrixXd warm_start_ista(const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& W,
                                const Eigen::VectorXd& h0_init,
                                const IstaConfig& cfg) {
  if (h0_init.size() != W.cols())
    throw std::invalid_argument("warm_start_ista: h0 size mismatch");
  if (cfg.n_iters < 1) throw std::invalid_argument("n_iters must be >= 1");
  const LayerOperator op =
      make_layer_operator(W, X, cfg.alpha, cfg.lambda1, cfg.nonnegative);
  Eigen::MatrixXd H(W.cols(), X.cols());
  Eigen::VectorXd h = h0_init;
  for (int t = 0; t < X.cols(); ++t) {
    for (int k = 0; k < cfg.n_iters; ++k) h = layer_step(op, h, t);
    H.col(t) = h;
  }
  return H;
}

Eigen::VectorXd ista(const Eigen::VectorXd& x, const Eigen::MatrixXd& W,
                     const Eigen::VectorXd& h0, const IstaConfig& cfg) {
  return warm_start_ista(x, W, h0, cfg).col(0);
}

double alpha_heuristic(int n_basis) {
  if (n_basis < 1) throw std::invalid_argument("n_basis must be >= 1");
  return n_basis / 4.0;
}

double alpha_coherence_bound(const Eigen::MatrixXd& W) {
  const Eigen::Index n = W.cols();
  const Eigen::MatrixXd gram = W.transpose() * W;
  double delta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) delta = std::max(delta, gram(i, j));
  return 1.0 + delta * static_cast<double>(n - 1);
}

double lipschitz_estimate(const Eigen::MatrixXd& W, int n_iters) {
  const Eigen::MatrixXd gram = W.transpose() * W;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.rows());
  v.normalize();
  for (int it = 0; it < n_iters; ++it) {
    Eigen::VectorXd gv = gram * v;
    const double n = gv.norm();
    if (n == 0.0) return 0.0;
    v = gv / n;
  }
  return v.dot(gram * v);
}

}  // namespace drnmf

// tests/oracles.h

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

// Independent reference implementations used only by the test suites. They
// deliberately avoid the library's own computation paths.

#ifndef DRNMF_TESTS_ORACLES_H_
#define DRNMF_TESTS_ORACLES_H_

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// O(n^2) DFT of one windowed frame; returns the first n/2+1 bin moduli.
inline Eigen::VectorXd naive_windowed_dft_magnitude(
    const std::vector<double>& frame, const Eigen::VectorXd& window) {
  const int n = static_cast<int>(frame.size());
  const int bins = n / 2 + 1;
  Eigen::VectorXd mag(bins);
  for (int f = 0; f < bins; ++f) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      const double angle = -2.0 * M_PI * f * i / n;
      acc += window[i] * frame[i] *
             std::complex<double>(std::cos(angle), std::sin(angle));
    }
    mag[f] = std::abs(acc);
  }
  return mag;
}

// Solves 10*log10(e_clean / (g^2 e_noise)) = snr_db for g by bisection.
inline double snr_gain_bisection(double e_clean, double e_noise,
                                 double snr_db) {
  auto measured = [&](double g) {
    return 10.0 * std::log10(e_clean / (g * g * e_noise));
  };
  double lo = 1e-9, hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (measured(mid) > snr_db)
      lo = mid;  // gain too small, SNR too high
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Elementwise double-loop sum of 0.5*(X - W H)^2 + lambda1*|H|.
inline double naive_snmf_objective(const Eigen::MatrixXd& X,
                                   const Eigen::MatrixXd& W,
                                   const Eigen::MatrixXd& H, double lambda1) {
  double fit = 0.0;
  for (int f = 0; f < X.rows(); ++f)
    for (int t = 0; t < X.cols(); ++t) {
      double wh = 0.0;
      for (int j = 0; j < W.cols(); ++j) wh += W(f, j) * H(j, t);
      const double d = X(f, t) - wh;
      fit += 0.5 * d * d;
    }
  double l1 = 0.0;
  for (int j = 0; j < H.rows(); ++j)
    for (int t = 0; t < H.cols(); ++t) l1 += std::abs(H(j, t));
  return fit + lambda1 * l1;
}

// Elementwise double-loop sum of (Y - M .* X)^2.
inline double naive_signal_approx_loss(const Eigen::MatrixXd& Y,
                                       const Eigen::MatrixXd& X,
                                       const Eigen::MatrixXd& M) {
  double loss = 0.0;
  for (int f = 0; f < Y.rows(); ++f)
    for (int t = 0; t < Y.cols(); ++t) {
      const double d = Y(f, t) - M(f, t) * X(f, t);
      loss += d * d;
    }
  return loss;
}

// Global minimum of 0.5*||x - W h||^2 + lambda1*1'h over h >= 0 by active-set
// enumeration (2^N subsets; meant for tiny N). On the positive orthant the
// objective is smooth, so each candidate solves the subset's normal
// equations with the l1 gradient folded in; feasible candidates bound the
// minimum from above and the true active set attains it.
inline double nonneg_lasso_oracle_objective(const Eigen::MatrixXd& W,
                                            const Eigen::VectorXd& x,
                                            double lambda1) {
  const int n = static_cast<int>(W.cols());
  double best = 0.5 * x.squaredNorm();  // h = 0
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> active;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) active.push_back(j);
    Eigen::MatrixXd Ws(W.rows(), active.size());
    for (size_t a = 0; a < active.size(); ++a) Ws.col(a) = W.col(active[a]);
    const Eigen::MatrixXd G = Ws.transpose() * Ws;
    const Eigen::VectorXd rhs =
        Ws.transpose() * x -
        lambda1 * Eigen::VectorXd::Ones(static_cast<int>(active.size()));
    const Eigen::VectorXd hs = G.ldlt().solve(rhs);
    if ((hs.array() < 0.0).any()) continue;
    const double obj =
        0.5 * (x - Ws * hs).squaredNorm() + lambda1 * hs.sum();
    best = std::min(best, obj);
  }
  return best;
}

// Naive double-loop Gram scan for the coherence bound 1 + delta*(N-1).
inline double naive_coherence_bound(const Eigen::MatrixXd& W) {
  const int n = static_cast<int>(W.cols());
  double delta = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double dot = 0.0;
      for (int f = 0; f < W.rows(); ++f) dot += W(f, i) * W(f, j);
      delta = std::max(delta, dot);
    }
  return 1.0 + delta * (n - 1);
}

}  // namespace oracles

#endif  // DRNMF_TESTS_ORACLES_H_

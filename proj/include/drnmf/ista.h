// include/drnmf/ista.h

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

#ifndef DRNMF_ISTA_H_
#define DRNMF_ISTA_H_

#include <Eigen/Dense>

namespace drnmf {

struct IstaConfig {
  double alpha = 1.0;      // inverse step size, step is 1/alpha
  double lambda1 = 0.1;
  int n_iters = 5;         // K
  bool nonnegative = true; // one-sided threshold (ReLU)
};

double soft_threshold(double z, double b, bool nonnegative);
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& z, double b,
                               bool nonnegative);

// One iteration against a fixed dictionary with the Gram matrix and W^T X
// precomputed:  h' = soft_{lambda1/alpha}(h - (G h - WtX[:,t]) / alpha).
// Shared by the ISTA solvers and the unfolded network so that tied weights
// give identical arithmetic.
struct LayerOperator {
  Eigen::MatrixXd gram;  // N x N
  Eigen::MatrixXd wtx;   // N x T
  double inv_alpha = 1.0;
  double threshold = 0.0;
  bool nonnegative = true;
};

LayerOperator make_layer_operator(const Eigen::MatrixXd& W,
                                  const Eigen::MatrixXd& X, double alpha,
                                  double lambda1, bool nonnegative);

Eigen::VectorXd layer_step(const LayerOperator& op, const Eigen::VectorXd& h,
                           int frame);

// K iterations on a single observation from initial coefficients h0.
Eigen::VectorXd ista(const Eigen::VectorXd& x, const Eigen::MatrixXd& W,
                     const Eigen::VectorXd& h0, const IstaConfig& cfg);

// Runs K iterations per frame, initializing frame t from frame t-1's
// output (warm start); frame 0 starts from h0_init.
Eigen::MatrixXd warm_start_ista(const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& W,
                                const Eigen::VectorXd& h0_init,
                                const IstaConfig& cfg);

// Practical inverse-step-size choice: N / 4.
double alpha_heuristic(int n_basis);

// 1 + delta * (N - 1) with delta the maximum inner product between distinct
// unit-norm columns.
double alpha_coherence_bound(const Eigen::MatrixXd& W);

// Largest eigenvalue of W^T W by power iteration; a Lipschitz constant of
// the smooth objective part.
double lipschitz_estimate(const Eigen::MatrixXd& W, int n_iters = 200);

}  // namespace drnmf

#endif  // DRNMF_ISTA_H_

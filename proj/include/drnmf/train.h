// include/drnmf/train.h

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

#ifndef DRNMF_TRAIN_H_
#define DRNMF_TRAIN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drnmf/network.h"
#include "drnmf/snmf.h"

namespace drnmf {

// Loss gradients with respect to the log-domain parameters.
struct Gradients {
  std::vector<Eigen::MatrixXd> W_log;
  Eigen::VectorXd alpha_log;
  Eigen::VectorXd h0_log;

  void set_zero_like(const DrNmfParams& p);
  void accumulate(const Gradients& other, double scale);
};

struct BackwardOptions {
  // Negates the data term of the alpha gradient; a deliberately wrong
  // gradient used as the gradient checker's negative control.
  bool corrupt_alpha_term = false;
};

struct BackwardResult {
  double loss = 0.0;
  Gradients grad;
};

// Reverse-mode differentiation of signal_approx_loss through the mask, the
// unfolded recurrence (ReLU subgradient, zero at exactly zero) and the
// exp/unit-norm reparameterization. `trace` must come from forward(p, X).
BackwardResult backward(const DrNmfParams& p, const Eigen::MatrixXd& X,
                        const Eigen::MatrixXd& Y, const ForwardTrace& trace,
                        const BackwardOptions& opts = {});

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Eigen::MatrixXd> m_W, v_W;
  Eigen::VectorXd m_alpha, v_alpha, m_h0, v_h0;
};

AdamState make_adam_state(const DrNmfParams& p, const AdamConfig& cfg);

// Bias-corrected update: p -= lr * m_hat / (sqrt(v_hat) + epsilon).
void adam_step(AdamState& state, DrNmfParams& p, const Gradients& g);

struct SupervisedExample {
  Eigen::MatrixXd X;  // noisy magnitudes, F x T
  Eigen::MatrixXd Y;  // clean magnitudes, F x T
};

// Splits a full-utterance pair into chunks of at most max_frames columns.
std::vector<SupervisedExample> split_sequence(const Eigen::MatrixXd& X,
                                              const Eigen::MatrixXd& Y,
                                              int max_frames);

struct TrainConfig {
  int batch_size = 32;
  int max_seq_frames = 500;
  int patience_epochs = 50;
  int max_epochs = 500;
  std::uint64_t shuffle_seed = 0;
  AdamConfig adam;
  // Called after each epoch as (record); used for progress logging.
  std::function<void(const struct EpochRecord&)> progress;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  DrNmfParams best_params;
  std::vector<EpochRecord> history;
  double best_val_loss = 0.0;
  int best_epoch = -1;
};

double mean_loss(const DrNmfParams& p,
                 const std::vector<SupervisedExample>& set);

// Mini-batch Adam with early stopping. Epoch 0 records the losses of the
// initial parameters (no update) and seeds the best checkpoint, so the
// returned parameters are never worse on validation than the input.
TrainResult train_loop(const DrNmfParams& init,
                       const std::vector<SupervisedExample>& train_set,
                       const std::vector<SupervisedExample>& val_set,
                       const TrainConfig& cfg);

void write_history_csv(const std::string& path,
                       const std::vector<EpochRecord>& history);

// Training-procedure step 3: all layers tied to the learned dictionary,
// alpha0 and a constant initial state, taken through log(epsilon + .).
DrNmfParams initialize_from_snmf(const Dictionary& dict, double lambda1, int K,
                                 double alpha0, double h0_const,
                                 double epsilon_log = 1e-8,
                                 double epsilon_mask = 1e-12);

struct GradCheckTensor {
  std::string name;
  double max_rel_err = 0.0;
  std::string worst_coord;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckTensor> tensors;
  double max_rel_err = 0.0;
  bool passed(double threshold = 1e-5) const { return max_rel_err < threshold; }
};

// Central finite differences of the loss against backward() on randomly
// probed coordinates (all coordinates when a tensor has fewer than
// `probes_per_tensor`). The numeric side uses forward() only.
GradCheckReport gradient_check(const DrNmfParams& p, const Eigen::MatrixXd& X,
                               const Eigen::MatrixXd& Y, int probes_per_tensor,
                               std::uint64_t seed, double fd_step = 1e-5,
                               const BackwardOptions& opts = {});

}  // namespace drnmf

#endif  // DRNMF_TRAIN_H_

// include/drnmf/network.h

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

#ifndef DRNMF_NETWORK_H_
#define DRNMF_NETWORK_H_

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "drnmf/signal.h"

namespace drnmf {

// Untied per-layer weights in the log domain. Realized weights are
// exp(W_log[k]) with columns renormalized, exp(alpha_log[k]), exp(h0_log);
// nonnegativity and unit-norm columns hold by construction.
struct DrNmfParams {
  std::vector<Eigen::MatrixXd> W_log;  // K matrices, F x N
  Eigen::VectorXd alpha_log;           // K
  Eigen::VectorXd h0_log;              // N
  double lambda1 = 0.1;
  int n_speech = 0;
  int n_noise = 0;
  double epsilon_log = 1e-8;
  double epsilon_mask = 1e-12;

  int num_layers() const { return static_cast<int>(W_log.size()); }
  int num_bins() const { return W_log.empty() ? 0 : static_cast<int>(W_log[0].rows()); }
  int num_basis() const { return n_speech + n_noise; }
};

struct RealizedWeights {
  std::vector<Eigen::MatrixXd> W;  // unit-norm nonnegative columns
  Eigen::VectorXd alpha;
  Eigen::VectorXd h0;
};

RealizedWeights realize_weights(const DrNmfParams& p);

struct ForwardTrace {
  RealizedWeights weights;
  // states[t] is N x (K+1): column 0 is the warm-start input h_t^(0),
  // column k is h_t^(k).
  std::vector<Eigen::MatrixXd> states;
  Eigen::MatrixXd H;       // N x T, final-layer activations
  Eigen::MatrixXd y_hat;   // F x T, speech estimate W^(y) H^(y)
  Eigen::MatrixXd v_hat;   // F x T, noise estimate
  Eigen::MatrixXd mask;    // F x T, in [0, 1]
  Eigen::MatrixXd output;  // F x T, mask .* X
};

// Unfolded warm-start ISTA: layer k at frame t applies layer_step with
// W[k], alpha[k]; frame t starts from frame t-1's final state (h0 for the
// first frame). The speech/noise estimates use the final layer's dictionary.
ForwardTrace forward(const DrNmfParams& p, const Eigen::MatrixXd& X);

// (y_hat + eps/2) ./ (y_hat + v_hat + eps); the 0/0 case yields 0.5.
Eigen::MatrixXd compute_mask(const Eigen::MatrixXd& y_hat,
                             const Eigen::MatrixXd& v_hat, double epsilon_mask);

// sum_{f,t} (Y - mask .* X)^2
double signal_approx_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& mask);

enum class MaskMode { kModel, kIdentity, kZero };

// Frame-sequential separation; per-frame state does not grow with the
// signal length. state_bytes() reports the persistent working set.
class StreamingSeparator {
 public:
  StreamingSeparator(const DrNmfParams& p, int frame_size, int hop,
                     MaskMode mode = MaskMode::kModel);

  // Feeds the next frame_size samples (advancing by hop) and accumulates
  // the masked synthesis frame into the caller's overlap-add buffers.
  void process_frame(const Eigen::VectorXd& frame, double* ola_num,
                     double* ola_den);

  size_t state_bytes() const;
  int frame_size() const { return frame_size_; }
  int hop() const { return hop_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  int frame_size_;
  int hop_;
};

// Masked reconstruction: istft of mask .* STFT(noisy).
Waveform separate(const DrNmfParams& p, const Waveform& noisy,
                  int frame_size = kDefaultFrameSize, int hop = kDefaultHop,
                  MaskMode mode = MaskMode::kModel);

}  // namespace drnmf

#endif  // DRNMF_NETWORK_H_

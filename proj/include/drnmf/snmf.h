// include/drnmf/snmf.h

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

#ifndef DRNMF_SNMF_H_
#define DRNMF_SNMF_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace drnmf {

// Nonnegative dictionary with unit-norm columns, partitioned into a speech
// block (first n_speech columns) and a noise block.
struct Dictionary {
  Eigen::MatrixXd W;  // F x N
  int n_speech = 0;
  int n_noise = 0;

  int num_bins() const { return static_cast<int>(W.rows()); }
  int size() const { return n_speech + n_noise; }
  Eigen::Ref<const Eigen::MatrixXd> speech_block() const {
    return W.leftCols(n_speech);
  }
  Eigen::Ref<const Eigen::MatrixXd> noise_block() const {
    return W.rightCols(n_noise);
  }
};

struct SnmfConfig {
  double lambda1 = 0.1;
  int n_iters = 200;
  double epsilon_mu = 1e-12;  // denominator floor
  std::uint64_t seed = 0;     // W/H initialization
  // Called as (iteration, objective) when set; used for progress logging.
  std::function<void(int, double)> progress;
  int progress_every = 0;
};

// 0.5 * ||X - W H||_F^2 + lambda1 * ||H||_1
double snmf_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                      const Eigen::MatrixXd& H, double lambda1);

// One multiplicative update of H followed by one update of the W columns
// where update_cols is true (empty mask = update all). Frozen columns are
// bitwise unchanged; updated columns are renormalized to unit norm.
void mu_step(const Eigen::MatrixXd& X, Eigen::MatrixXd& W, Eigen::MatrixXd& H,
             double lambda1, double epsilon_mu,
             const std::vector<bool>& update_cols = {});

// H-only multiplicative update against a fixed dictionary.
void mu_update_h(const Eigen::MatrixXd& X, const Eigen::MatrixXd& W,
                 Eigen::MatrixXd& H, double lambda1, double epsilon_mu);

Eigen::MatrixXd random_dictionary(int n_bins, int n_cols, std::uint64_t seed);
Eigen::MatrixXd random_activations(int n_cols, int n_frames, std::uint64_t seed);

// Training-procedure step 1: MU on the concatenated clean magnitudes.
Dictionary train_speech_dict(const std::vector<Eigen::MatrixXd>& clean_mags,
                             int n_speech, const SnmfConfig& cfg);

// Training-procedure step 2: MU on noisy magnitudes with the speech block
// frozen; returns the full [speech, noise] dictionary.
Dictionary train_noise_dict(const std::vector<Eigen::MatrixXd>& noisy_mags,
                            const Dictionary& speech, int n_noise,
                            const SnmfConfig& cfg);

// cfg.n_iters H-only MU steps from a seeded uniform initialization.
Eigen::MatrixXd infer_h_mu(const Eigen::MatrixXd& X, const Dictionary& dict,
                           const SnmfConfig& cfg);

}  // namespace drnmf

#endif  // DRNMF_SNMF_H_

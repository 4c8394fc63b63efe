// tests/network_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "drnmf/common.h"
#include "drnmf/ista.h"
#include "drnmf/network.h"
#include "drnmf/snmf.h"
#include "drnmf/train.h"
#include "oracles.h"

using namespace drnmf;

namespace {

Eigen::MatrixXd random_nonneg(int rows, int cols, std::uint64_t seed,
                              double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = uni(rng);
  return m;
}

DrNmfParams small_model(int F, int n_speech, int n_noise, int K,
                        std::uint64_t seed) {
  const Dictionary dict{random_dictionary(F, n_speech + n_noise, seed),
                        n_speech, n_noise};
  return initialize_from_snmf(dict, 0.1, K, alpha_coherence_bound(dict.W),
                              1e-3);
}

}  // namespace

TEST_CASE("realize_weights") {
  SUBCASE("unit-norm columns by construction") {
    DrNmfParams p = small_model(6, 2, 2, 3, 1);
    // Perturb away from the tied initialization.
    p.W_log[1].array() += random_nonneg(6, 4, 2, 0.5).array();
    const RealizedWeights r = realize_weights(p);
    for (const auto& W : r.W) {
      CHECK(W.minCoeff() > 0.0);
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        CHECK(std::abs(W.col(j).norm() - 1.0) < 1e-12);
    }
  }

  SUBCASE("initialization round trips within the epsilon perturbation") {
    const int F = 8, N = 4;
    const Eigen::MatrixXd W0 = random_dictionary(F, N, 3);
    const Dictionary dict{W0, 2, 2};
    const double eps = 1e-8;
    const DrNmfParams p = initialize_from_snmf(dict, 0.1, 2, 16.0, 1e-3, eps);
    const RealizedWeights r = realize_weights(p);
    CHECK((r.W[0] - W0).cwiseAbs().maxCoeff() <= 2.0 * eps * N);
    CHECK(r.alpha[0] == doctest::Approx(16.0 + eps).epsilon(1e-12));
    CHECK(r.alpha[1] == doctest::Approx(16.0 + eps).epsilon(1e-12));
    for (int i = 0; i < N; ++i)
      CHECK(r.h0[i] == doctest::Approx(1e-3 + eps).epsilon(1e-12));
  }

  SUBCASE("overflow is reported with the parameter name") {
    DrNmfParams p = small_model(6, 2, 2, 2, 4);
    p.alpha_log[0] = 1e4;
    CHECK_THROWS_AS(realize_weights(p), NumericError);
    p = small_model(6, 2, 2, 2, 4);
    p.W_log[1](0, 0) = 1e4;
    CHECK_THROWS_WITH_AS(realize_weights(p),
                         "realize_weights: overflow in exp(W_log_2)",
                         NumericError);
  }
}

TEST_CASE("forward matches warm-start ISTA with tied weights") {
  const DrNmfParams p = small_model(16, 3, 3, 4, 5);
  const Eigen::MatrixXd X = random_nonneg(16, 10, 6, 2.0);
  const ForwardTrace trace = forward(p, X);

  const RealizedWeights r = realize_weights(p);
  IstaConfig cfg;
  cfg.alpha = r.alpha[0];
  cfg.lambda1 = p.lambda1;
  cfg.n_iters = 4;
  cfg.nonnegative = true;
  const Eigen::MatrixXd H = warm_start_ista(X, r.W[0], r.h0, cfg);
  CHECK((trace.H - H).cwiseAbs().maxCoeff() == 0.0);  // same code path
}

TEST_CASE("forward trace contents") {
  const DrNmfParams p = small_model(12, 2, 3, 3, 7);
  const Eigen::MatrixXd X = random_nonneg(12, 6, 8, 2.0);
  const ForwardTrace trace = forward(p, X);

  SUBCASE("states are nonnegative and chained across frames") {
    REQUIRE(trace.states.size() == 6);
    for (const auto& s : trace.states) {
      REQUIRE(s.rows() == 5);
      REQUIRE(s.cols() == 4);
      CHECK(s.minCoeff() >= 0.0);
    }
    CHECK(trace.states[0].col(0) == realize_weights(p).h0);
    for (int t = 1; t < 6; ++t)
      CHECK(trace.states[t].col(0) == trace.states[t - 1].col(3));
    for (int t = 0; t < 6; ++t)
      CHECK(trace.H.col(t) == trace.states[t].col(3));
  }

  SUBCASE("mask entries live in [0, 1] and output is mask times input") {
    CHECK(trace.mask.minCoeff() >= 0.0);
    CHECK(trace.mask.maxCoeff() <= 1.0);
    CHECK((trace.output.array() - trace.mask.array() * X.array())
              .abs()
              .maxCoeff() == 0.0);
  }

  SUBCASE("speech and noise estimates use the final layer dictionary") {
    const RealizedWeights r = realize_weights(p);
    const Eigen::MatrixXd want_y = r.W[2].leftCols(2) * trace.H.topRows(2);
    CHECK((trace.y_hat - want_y).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("forward on zero input") {
  DrNmfParams p = small_model(10, 2, 2, 3, 9);
  // A tiny initial state stands in for the unreachable exact zero.
  p.h0_log.setConstant(std::log(1e-12));
  const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(10, 4);
  const ForwardTrace trace = forward(p, X);
  CHECK(trace.H.maxCoeff() <= 1e-12);
  CHECK(trace.output.cwiseAbs().maxCoeff() == 0.0);
  CHECK(trace.mask.minCoeff() >= 0.0);
  CHECK(trace.mask.maxCoeff() <= 1.0);
  CHECK(signal_approx_loss(Eigen::MatrixXd::Zero(10, 4), X, trace.mask) == 0.0);
}

TEST_CASE("forward errors") {
  const DrNmfParams p = small_model(10, 2, 2, 2, 10);
  CHECK_THROWS_AS(forward(p, random_nonneg(9, 4, 11)), std::invalid_argument);
}

TEST_CASE("compute_mask") {
  SUBCASE("equal estimates give one half") {
    const Eigen::MatrixXd y = random_nonneg(4, 3, 12, 2.0).array() + 0.1;
    const Eigen::MatrixXd m = compute_mask(y, y, 1e-12);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      CHECK(m(i) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("zero noise estimate saturates toward one") {
    const Eigen::MatrixXd y = Eigen::MatrixXd::Constant(3, 3, 0.5);
    const Eigen::MatrixXd m =
        compute_mask(y, Eigen::MatrixXd::Zero(3, 3), 1e-12);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      CHECK(m(i) <= 1.0);
      CHECK(1.0 - m(i) <= 1e-12 / 0.5);
    }
  }
  SUBCASE("0/0 is exactly one half") {
    const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    const Eigen::MatrixXd m = compute_mask(z, z, 1e-12);
    for (Eigen::Index i = 0; i < m.size(); ++i) CHECK(m(i) == 0.5);
  }
}

TEST_CASE("signal_approx_loss") {
  SUBCASE("identity mask on clean-equals-noisy gives zero") {
    const Eigen::MatrixXd X = random_nonneg(4, 3, 13);
    CHECK(signal_approx_loss(X, X, Eigen::MatrixXd::Ones(4, 3)) == 0.0);
  }
  SUBCASE("zero mask against zero target gives zero") {
    const Eigen::MatrixXd X = random_nonneg(4, 3, 14);
    CHECK(signal_approx_loss(Eigen::MatrixXd::Zero(4, 3), X,
                             Eigen::MatrixXd::Zero(4, 3)) == 0.0);
  }
  SUBCASE("matches the naive summation oracle") {
    const Eigen::MatrixXd Y = random_nonneg(4, 3, 15);
    const Eigen::MatrixXd X = random_nonneg(4, 3, 16);
    const Eigen::MatrixXd M = random_nonneg(4, 3, 17);
    CHECK(signal_approx_loss(Y, X, M) ==
          doctest::Approx(oracles::naive_signal_approx_loss(Y, X, M))
              .epsilon(1e-12));
  }
  SUBCASE("loss is never negative") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd Y = random_nonneg(5, 4, rng());
      const Eigen::MatrixXd X = random_nonneg(5, 4, rng());
      const Eigen::MatrixXd M = random_nonneg(5, 4, rng());
      CHECK(signal_approx_loss(Y, X, M) >= 0.0);
    }
  }
}

TEST_CASE("permutation within partition blocks leaves mask and loss unchanged") {
  const int n_speech = 3, n_noise = 3, F = 10, K = 3;
  DrNmfParams p = small_model(F, n_speech, n_noise, K, 19);
  for (int k = 0; k < K; ++k)
    p.W_log[k].array() += random_nonneg(F, 6, 20 + k, 0.3).array();
  const Eigen::MatrixXd X = random_nonneg(F, 8, 23, 2.0);
  const Eigen::MatrixXd Y = random_nonneg(F, 8, 24, 2.0);

  const ForwardTrace base = forward(p, X);
  const double base_loss = signal_approx_loss(Y, X, base.mask);

  // Permute inside each block, consistently across layers and h0.
  std::vector<int> perm = {2, 0, 1, /* noise block: */ 4, 5, 3};
  DrNmfParams q = p;
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < 6; ++j) q.W_log[k].col(j) = p.W_log[k].col(perm[j]);
  for (int j = 0; j < 6; ++j) q.h0_log[j] = p.h0_log[perm[j]];

  const ForwardTrace permuted = forward(q, X);
  CHECK((permuted.mask - base.mask).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(signal_approx_loss(Y, X, permuted.mask) ==
        doctest::Approx(base_loss).epsilon(1e-12));
}

TEST_CASE("separate") {
  const int F = 257;
  const DrNmfParams p = small_model(F, 4, 4, 2, 25);

  Waveform noisy;
  noisy.samples.resize(4000);
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> uni(-0.4, 0.4);
  for (auto& v : noisy.samples) v = uni(rng);

  SUBCASE("identity mask reproduces the input interior") {
    const Waveform out = separate(p, noisy, 512, 128, MaskMode::kIdentity);
    const int margin = 512 - 128;
    double num = 0.0, den = 0.0;
    for (int i = margin; i < out.num_samples() - margin; ++i) {
      const double d = out.samples[i] - noisy.samples[i];
      num += d * d;
      den += noisy.samples[i] * noisy.samples[i];
    }
    CHECK(std::sqrt(num / den) < 1e-10);
  }

  SUBCASE("zero mask silences everything") {
    const Waveform out = separate(p, noisy, 512, 128, MaskMode::kZero);
    for (double v : out.samples) CHECK(v == 0.0);
  }

  SUBCASE("output length is the input rounded to the frame grid") {
    const Waveform out = separate(p, noisy);
    const int frames = (4000 - 512) / 128 + 1;
    CHECK(out.num_samples() == (frames - 1) * 128 + 512);
  }

  SUBCASE("model mask matches the batch forward path") {
    const Waveform out = separate(p, noisy);
    const Spectrogram s = stft(noisy);
    const ForwardTrace trace = forward(p, s.magnitude);
    Spectrogram masked = s;
    masked.complex_stft = s.complex_stft.cwiseProduct(
        trace.mask.cast<std::complex<double>>());
    const Waveform want = istft(masked);
    REQUIRE(out.num_samples() == want.num_samples());
    double max_diff = 0.0;
    for (int i = 0; i < out.num_samples(); ++i)
      max_diff =
          std::max(max_diff, std::abs(out.samples[i] - want.samples[i]));
    CHECK(max_diff < 1e-10);
  }

  SUBCASE("streaming state size does not grow with duration") {
    StreamingSeparator sep_a(p, 512, 128);
    StreamingSeparator sep_b(p, 512, 128);
    std::vector<double> num(4000, 0.0), den(4000, 0.0);
    Eigen::VectorXd frame(512);
    for (int t = 0; t < 3; ++t) {
      for (int i = 0; i < 512; ++i) frame[i] = noisy.samples[t * 128 + i];
      sep_a.process_frame(frame, num.data() + t * 128, den.data() + t * 128);
    }
    for (int t = 0; t < 25; ++t) {
      for (int i = 0; i < 512; ++i) frame[i] = noisy.samples[t * 128 + i];
      sep_b.process_frame(frame, num.data() + t * 128, den.data() + t * 128);
    }
    CHECK(sep_a.state_bytes() == sep_b.state_bytes());
  }
}

// tests/acceptance_test.cc

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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the binary exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "drnmf/corpus.h"
#include "drnmf/ista.h"
#include "drnmf/network.h"
#include "drnmf/signal.h"
#include "drnmf/snmf.h"
#include "drnmf/train.h"
#include "drnmf/wav_io.h"
#include "oracles.h"

using namespace drnmf;

namespace {

using clock_type = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, bool pass, const std::string& name,
            const std::string& detail, clock_type::time_point t0) {
  const double secs =
      std::chrono::duration<double>(clock_type::now() - t0).count();
  std::printf("[%d] %s %s (%s) [%.1f s]\n", id, pass ? "PASS" : "FAIL",
              name.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Eigen::MatrixXd random_nonneg(int rows, int cols, std::uint64_t seed,
                              double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = uni(rng);
  return m;
}

Eigen::MatrixXd slowly_varying(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd base(rows);
  for (int f = 0; f < rows; ++f) base[f] = 0.2 + 0.8 * uni(rng);
  for (int t = 0; t < cols; ++t) {
    for (int f = 0; f < rows; ++f)
      base[f] = std::max(0.0, base[f] + 0.03 * (uni(rng) - 0.5));
    X.col(t) = base;
  }
  return X;
}

double frame_objective(const Eigen::VectorXd& x, const Eigen::MatrixXd& W,
                       const Eigen::VectorXd& h, double lambda1) {
  return 0.5 * (x - W * h).squaredNorm() + lambda1 * h.cwiseAbs().sum();
}

// ---------------------------------------------------------------------------

void criterion_1_init_equivalence() {
  const auto t0 = clock_type::now();
  double max_state_diff = 0.0, max_loss_diff = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int F = 20 + trial % 5, n_sp = 4, n_no = 4;
    const Dictionary dict{random_dictionary(F, n_sp + n_no, 100 + trial),
                          n_sp, n_no};
    const double alpha0 = alpha_coherence_bound(dict.W);
    const DrNmfParams p = initialize_from_snmf(dict, 0.1, 5, alpha0, 1e-3);
    const Eigen::MatrixXd X = random_nonneg(F, 12, 200 + trial, 2.0);
    const Eigen::MatrixXd Y = random_nonneg(F, 12, 300 + trial, 2.0);

    const ForwardTrace trace = forward(p, X);

    const RealizedWeights r = realize_weights(p);
    IstaConfig cfg;
    cfg.alpha = r.alpha[0];
    cfg.lambda1 = p.lambda1;
    cfg.n_iters = p.num_layers();
    const Eigen::MatrixXd H = warm_start_ista(X, r.W[0], r.h0, cfg);
    max_state_diff =
        std::max(max_state_diff, (trace.H - H).cwiseAbs().maxCoeff());

    const Eigen::MatrixXd y_hat = r.W[0].leftCols(n_sp) * H.topRows(n_sp);
    const Eigen::MatrixXd v_hat = r.W[0].rightCols(n_no) * H.bottomRows(n_no);
    const Eigen::MatrixXd mask = compute_mask(y_hat, v_hat, p.epsilon_mask);
    const double direct = signal_approx_loss(Y, X, mask);
    const double net = signal_approx_loss(Y, X, trace.mask);
    max_loss_diff = std::max(
        max_loss_diff, std::abs(direct - net) / std::max(1.0, std::abs(direct)));
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "max state diff %.2e (tol 1e-12), max loss diff %.2e (tol 1e-10)",
                max_state_diff, max_loss_diff);
  report(1, max_state_diff < 1e-12 && max_loss_diff < 1e-10,
         "initialization equivalence", detail, t0);
}

void criterion_2_gradients() {
  const auto t0 = clock_type::now();
  struct Size {
    int F, n_speech, n_noise, K, T;
  };
  const std::vector<Size> sizes = {
      {9, 3, 3, 2, 5}, {12, 4, 3, 3, 7}, {7, 2, 3, 4, 6}};
  double worst = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const Size& sz = sizes[i];
    const Dictionary dict{
        random_dictionary(sz.F, sz.n_speech + sz.n_noise, 400 + i),
        sz.n_speech, sz.n_noise};
    const DrNmfParams p = initialize_from_snmf(
        dict, 0.1, sz.K, alpha_coherence_bound(dict.W), 1e-3);
    const Eigen::MatrixXd X = random_nonneg(sz.F, sz.T, 500 + i, 2.0);
    const Eigen::MatrixXd Y = random_nonneg(sz.F, sz.T, 600 + i, 2.0);
    const GradCheckReport report_i = gradient_check(p, X, Y, 50, 700 + i);
    worst = std::max(worst, report_i.max_rel_err);
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "3 model sizes, 50 probes per tensor, max rel err %.2e (tol 1e-5)",
                worst);
  report(2, worst < 1e-5, "gradient correctness vs finite differences", detail,
         t0);
}

void criterion_3_monotone_descent() {
  const auto t0 = clock_type::now();
  bool mu_ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int F = 12 + trial, N = 5 + trial % 4, T = 10 + trial;
    const Eigen::MatrixXd X = random_nonneg(F, T, 800 + trial, 3.0);
    Eigen::MatrixXd W = random_dictionary(F, N, 900 + trial);
    Eigen::MatrixXd H = random_activations(N, T, 900 + trial);
    double prev = snmf_objective(X, W, H, 0.1);
    for (int it = 0; it < 200; ++it) {
      mu_step(X, W, H, 0.1, 1e-12);
      const double cur = snmf_objective(X, W, H, 0.1);
      mu_ok = mu_ok && cur <= prev + 1e-9;
      prev = cur;
    }
  }

  bool ista_ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int F = 10 + trial, N = 4 + trial % 5;
    const Eigen::MatrixXd W = random_dictionary(F, N, 1000 + trial);
    const Eigen::VectorXd x =
        random_nonneg(F, 1, 1100 + trial, 2.0).col(0);
    const double alpha = lipschitz_estimate(W);
    const LayerOperator op = make_layer_operator(W, x, alpha, 0.1, true);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(N);
    double prev = frame_objective(x, W, h, 0.1);
    for (int k = 0; k < 200; ++k) {
      h = layer_step(op, h, 0);
      const double cur = frame_objective(x, W, h, 0.1);
      ista_ok = ista_ok && cur <= prev + 1e-10;
      prev = cur;
    }
  }
  report(3, mu_ok && ista_ok, "monotone descent",
         std::string("MU 10x200 iterations (slack 1e-9) ") +
             (mu_ok ? "ok" : "VIOLATED") +
             "; ISTA at Lipschitz alpha (slack 1e-10) " +
             (ista_ok ? "ok" : "VIOLATED"),
         t0);
}

void criterion_4_ista_oracle() {
  const auto t0 = clock_type::now();
  double worst_gap = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd W = random_dictionary(6, 3, 1200 + trial);
    const Eigen::VectorXd x =
        random_nonneg(6, 1, 1300 + trial, 1.0).col(0);
    IstaConfig cfg;
    cfg.lambda1 = 0.1;
    cfg.alpha = alpha_coherence_bound(W);
    cfg.n_iters = 5000;
    const Eigen::VectorXd h = ista(x, W, Eigen::VectorXd::Zero(3), cfg);
    const double obj = frame_objective(x, W, h, cfg.lambda1);
    const double oracle =
        oracles::nonneg_lasso_oracle_objective(W, x, cfg.lambda1);
    worst_gap = std::max(worst_gap, obj - oracle);
  }
  char detail[100];
  std::snprintf(detail, sizeof(detail),
                "N=3, K=5000, worst objective gap %.2e (tol 1e-8)", worst_gap);
  report(4, worst_gap < 1e-8, "ISTA reaches the active-set oracle", detail, t0);
}

void criterion_5_warm_start_benefit() {
  const auto t0 = clock_type::now();
  int wins = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const int F = 12, N = 6, T = 25;
    const Eigen::MatrixXd W = random_dictionary(F, N, 1400 + trial);
    const Eigen::MatrixXd X = slowly_varying(F, T, 1500 + trial);
    IstaConfig cfg;
    cfg.lambda1 = 0.1;
    cfg.alpha = alpha_coherence_bound(W);
    cfg.n_iters = 3;
    const Eigen::VectorXd h0 = Eigen::VectorXd::Constant(N, 1e-3);

    const Eigen::MatrixXd H_warm = warm_start_ista(X, W, h0, cfg);
    double warm = 0.0, cold = 0.0;
    for (int t = 0; t < T; ++t) {
      warm += frame_objective(X.col(t), W, H_warm.col(t), cfg.lambda1);
      const Eigen::VectorXd h_cold =
          ista(X.col(t), W, Eigen::VectorXd::Zero(N), cfg);
      cold += frame_objective(X.col(t), W, h_cold, cfg.lambda1);
    }
    if (warm <= cold) ++wins;
  }
  char detail[80];
  std::snprintf(detail, sizeof(detail), "warm <= cold in %d/100 trials (need 95)",
                wins);
  report(5, wins >= 95, "warm-start benefit", detail, t0);
}

// ---------------------------------------------------------------------------

struct PipelineArtifacts {
  std::vector<CorpusEntry> test_entries;
  Dictionary dict;
  DrNmfParams trained;
  bool trained_ok = false;
};

double evaluate_mean_sdr(const std::vector<CorpusEntry>& entries,
                         const std::function<Waveform(const Waveform&)>& fn) {
  double total = 0.0;
  for (const auto& e : entries) {
    const Waveform clean = read_wav(e.clean_path);
    const Waveform mix = read_wav(e.mix_path);
    Waveform estimate = fn(mix);
    Waveform ref = clean;
    ref.samples.resize(estimate.samples.size());
    total += sdr(ref, estimate);
  }
  return total / entries.size();
}

Waveform snmf_mu_separate(const Dictionary& dict, const Waveform& mix,
                          int mu_iters, double lambda1) {
  const Spectrogram s = stft(mix);
  SnmfConfig cfg;
  cfg.lambda1 = lambda1;
  cfg.n_iters = mu_iters;
  cfg.seed = 7;
  const Eigen::MatrixXd H = infer_h_mu(s.magnitude, dict, cfg);
  const Eigen::MatrixXd y_hat = dict.speech_block() * H.topRows(dict.n_speech);
  const Eigen::MatrixXd v_hat = dict.noise_block() * H.bottomRows(dict.n_noise);
  const Eigen::MatrixXd mask = compute_mask(y_hat, v_hat, 1e-12);
  Spectrogram masked = s;
  masked.complex_stft =
      s.complex_stft.cwiseProduct(mask.cast<std::complex<double>>());
  return istft(masked);
}

void criterion_6_end_to_end(PipelineArtifacts& artifacts) {
  const auto t0 = clock_type::now();
  const std::string work = "acceptance_work";
  std::filesystem::remove_all(work);

  const double duration_s = 1.25;
  const double lambda1 = 0.1;
  const auto train_entries = synth_corpus(60, 1000, duration_s, work + "/train");
  const auto val_entries = synth_corpus(12, 2000, duration_s, work + "/val");
  artifacts.test_entries = synth_corpus(12, 3000, duration_s, work + "/test");

  // Steps 1-2: dictionaries by multiplicative updates.
  std::vector<Eigen::MatrixXd> clean_mags, mix_mags;
  for (const auto& e : train_entries) {
    clean_mags.push_back(stft(read_wav(e.clean_path)).magnitude);
    mix_mags.push_back(stft(read_wav(e.mix_path)).magnitude);
  }
  SnmfConfig scfg;
  scfg.lambda1 = lambda1;
  scfg.n_iters = 200;
  scfg.seed = 42;
  const Dictionary speech = train_speech_dict(clean_mags, 32, scfg);
  artifacts.dict = train_noise_dict(mix_mags, speech, 32, scfg);

  // Steps 3-4: initialize the unfolded network and train it.
  const int K = 5;
  const double alpha0 = alpha_heuristic(artifacts.dict.size());
  const DrNmfParams init =
      initialize_from_snmf(artifacts.dict, lambda1, K, alpha0, 1e-3);

  auto to_examples = [](const std::vector<CorpusEntry>& entries) {
    return load_supervised_examples(entries, kDefaultFrameSize, kDefaultHop,
                                    500);
  };
  const auto train_set = to_examples(train_entries);
  const auto val_set = to_examples(val_entries);

  TrainConfig tcfg;
  tcfg.batch_size = 8;
  tcfg.max_epochs = 250;
  tcfg.patience_epochs = 60;
  tcfg.shuffle_seed = 42;
  tcfg.adam.learning_rate = 1e-3;
  const TrainResult result = train_loop(init, train_set, val_set, tcfg);
  artifacts.trained = result.best_params;
  artifacts.trained_ok = true;

  const double init_val = result.history.front().val_loss;
  const double val_drop = (init_val - result.best_val_loss) / init_val;

  // Test-set SDR: mixtures, multiplicative-update inference, network.
  const double mix_sdr = evaluate_mean_sdr(
      artifacts.test_entries, [](const Waveform& mix) { return mix; });
  const double snmf_sdr = evaluate_mean_sdr(
      artifacts.test_entries, [&](const Waveform& mix) {
        return snmf_mu_separate(artifacts.dict, mix, 200, lambda1);
      });
  const double net_sdr = evaluate_mean_sdr(
      artifacts.test_entries, [&](const Waveform& mix) {
        return separate(artifacts.trained, mix);
      });

  const bool ok_loss = val_drop >= 0.10;
  const bool ok_vs_mix = net_sdr >= mix_sdr + 3.0;
  const bool ok_vs_snmf = net_sdr >= snmf_sdr;
  char detail[240];
  std::snprintf(detail, sizeof(detail),
                "val loss %.1f -> %.1f (-%.1f%%, need 10%%); test SDR: "
                "mixture %.2f dB, SNMF-MU %.2f dB, DR-NMF %.2f dB (need "
                ">= mix+3 and >= SNMF); %zu epochs",
                init_val, result.best_val_loss, 100.0 * val_drop, mix_sdr,
                snmf_sdr, net_sdr, result.history.size());
  report(6, ok_loss && ok_vs_mix && ok_vs_snmf, "end-to-end separation",
         detail, t0);
}

void criterion_7_speed(const PipelineArtifacts& artifacts) {
  const auto t0 = clock_type::now();
  if (!artifacts.trained_ok) {
    report(7, false, "test-time speed", "skipped: pipeline unavailable", t0);
    return;
  }
  std::vector<CorpusEntry> subset(artifacts.test_entries.begin(),
                                  artifacts.test_entries.begin() + 10);
  std::vector<Waveform> mixes;
  for (const auto& e : subset) mixes.push_back(read_wav(e.mix_path));

  // Warm both paths once before timing.
  separate(artifacts.trained, mixes[0]);
  snmf_mu_separate(artifacts.dict, mixes[0], 200, 0.1);

  auto t_net0 = clock_type::now();
  for (const auto& mix : mixes) separate(artifacts.trained, mix);
  const double net_s =
      std::chrono::duration<double>(clock_type::now() - t_net0).count();

  auto t_mu0 = clock_type::now();
  for (const auto& mix : mixes) snmf_mu_separate(artifacts.dict, mix, 200, 0.1);
  const double mu_s =
      std::chrono::duration<double>(clock_type::now() - t_mu0).count();

  const double ratio = mu_s / net_s;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "10 utterances at N=64: DR-NMF K=5 %.2fs, SNMF-MU 200 "
                "iterations %.2fs, speedup %.1fx (need 10x)",
                net_s, mu_s, ratio);
  report(7, ratio >= 10.0, "test-time speed", detail, t0);
}

void criterion_8_property_suites() {
  const auto t0 = clock_type::now();
  std::string issues;

  // STFT round trip on random signals.
  {
    std::mt19937_64 rng(1600);
    std::uniform_real_distribution<double> uni(-0.8, 0.8);
    for (int trial = 0; trial < 5; ++trial) {
      Waveform w;
      w.samples.resize(4000 + 512 * trial);
      for (auto& v : w.samples) v = uni(rng);
      const Waveform r = istft(stft(w));
      const int margin = 512 - 128;
      double num = 0.0, den = 0.0;
      for (int i = margin; i < r.num_samples() - margin; ++i) {
        const double d = r.samples[i] - w.samples[i];
        num += d * d;
        den += w.samples[i] * w.samples[i];
      }
      if (std::sqrt(num / den) >= 1e-10) issues += "stft-round-trip ";
    }
  }

  // Mask bounds and state nonnegativity on random models.
  for (int trial = 0; trial < 5; ++trial) {
    const Dictionary dict{random_dictionary(14, 8, 1700 + trial), 4, 4};
    DrNmfParams p = initialize_from_snmf(
        dict, 0.1, 3, alpha_coherence_bound(dict.W), 1e-3);
    p.W_log[1].array() += random_nonneg(14, 8, 1800 + trial, 0.4).array();
    const ForwardTrace trace =
        forward(p, random_nonneg(14, 9, 1900 + trial, 2.0));
    if (trace.mask.minCoeff() < 0.0 || trace.mask.maxCoeff() > 1.0)
      issues += "mask-bounds ";
    for (const auto& s : trace.states)
      if (s.minCoeff() < 0.0) issues += "state-nonneg ";
  }

  // Corpus determinism at the byte level.
  {
    const auto a = synth_corpus(3, 77, 0.6, "acceptance_work/det_a");
    const auto b = synth_corpus(3, 77, 0.6, "acceptance_work/det_b");
    for (size_t i = 0; i < a.size(); ++i) {
      std::ifstream fa(a[i].mix_path, std::ios::binary);
      std::ifstream fb(b[i].mix_path, std::ios::binary);
      const std::string bytes_a((std::istreambuf_iterator<char>(fa)),
                                std::istreambuf_iterator<char>());
      const std::string bytes_b((std::istreambuf_iterator<char>(fb)),
                                std::istreambuf_iterator<char>());
      if (bytes_a != bytes_b || bytes_a.empty()) issues += "corpus-determinism ";
    }
  }

  // Training determinism and checkpoint optimality at desk scale.
  {
    const Dictionary dict{random_dictionary(10, 6, 2000), 3, 3};
    const DrNmfParams init = initialize_from_snmf(
        dict, 0.1, 2, alpha_coherence_bound(dict.W), 1e-3);
    std::vector<SupervisedExample> data;
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd Y = random_nonneg(10, 12, 2100 + i, 2.0);
      const Eigen::MatrixXd V = random_nonneg(10, 12, 2200 + i, 1.0);
      data.push_back({Y + V, Y});
    }
    TrainConfig cfg;
    cfg.max_epochs = 12;
    cfg.patience_epochs = 12;
    cfg.batch_size = 2;
    cfg.shuffle_seed = 5;
    const TrainResult r1 = train_loop(init, data, data, cfg);
    const TrainResult r2 = train_loop(init, data, data, cfg);
    for (size_t i = 0; i < r1.history.size(); ++i)
      if (r1.history[i].val_loss != r2.history[i].val_loss)
        issues += "train-determinism ";
    double min_val = r1.history.front().val_loss;
    for (const auto& rec : r1.history)
      min_val = std::min(min_val, rec.val_loss);
    if (r1.best_val_loss != min_val) issues += "checkpoint-minimum ";
    const double replay = mean_loss(r1.best_params, data);
    if (std::abs(replay - r1.best_val_loss) > 1e-9 * std::max(1.0, replay))
      issues += "checkpoint-replay ";
  }

  report(8, issues.empty(), "property suites",
         issues.empty()
             ? "stft round trip, mask bounds, nonnegativity, determinism, "
               "checkpoint optimality"
             : "violated: " + issues,
         t0);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1_init_equivalence();
  criterion_2_gradients();
  criterion_3_monotone_descent();
  criterion_4_ista_oracle();
  criterion_5_warm_start_benefit();
  PipelineArtifacts artifacts;
  criterion_6_end_to_end(artifacts);
  criterion_7_speed(artifacts);
  criterion_8_property_suites();
  std::printf("%s\n", g_failures == 0 ? "all criteria passed"
                                      : "FAILURES PRESENT");
  return g_failures == 0 ? 0 : 1;
}

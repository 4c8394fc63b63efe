// tools/drnmf_cli.cc

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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drnmf/common.h"
#include "drnmf/corpus.h"
#include "drnmf/ista.h"
#include "drnmf/model_io.h"
#include "drnmf/network.h"
#include "drnmf/signal.h"
#include "drnmf/snmf.h"
#include "drnmf/train.h"
#include "drnmf/wav_io.h"

namespace {

using namespace drnmf;

// Every experiment knob lives in one flat key-value document; any key can
// come from --config <file> or be overridden by its --key flag.
struct PipelineConfig {
  int frame_size = 512;
  int hop = 128;
  int n_speech = 100;
  int n_noise = 100;
  int num_layers = 5;       // K
  double lambda1 = 0.1;
  double alpha = 0.0;       // 0 = auto (N/4)
  double h0_const = 1e-3;
  int mu_iters = 200;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_seq_frames = 500;
  int patience_epochs = 50;
  int max_epochs = 500;
  int n_utts = 60;
  double duration_s = 2.0;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;

  double effective_alpha(int n_basis) const {
    return alpha > 0.0 ? alpha : alpha_heuristic(n_basis);
  }
};

void add_config_options(CLI::App& app, PipelineConfig& cfg) {
  app.set_config("--config", "", "Flat key = value config file");
  app.allow_config_extras(false);
  auto add_int = [&](const char* name, int& v, const char* help) {
    app.add_option(name, v, help)->capture_default_str();
  };
  auto add_dbl = [&](const char* name, double& v, const char* help) {
    app.add_option(name, v, help)->capture_default_str();
  };
  add_int("--frame-size", cfg.frame_size, "STFT frame size in samples");
  add_int("--hop", cfg.hop, "STFT hop in samples");
  add_int("--n-speech", cfg.n_speech, "Speech dictionary columns");
  add_int("--n-noise", cfg.n_noise, "Noise dictionary columns");
  add_int("--num-layers", cfg.num_layers, "Unfolded layers per frame (K)");
  add_dbl("--lambda1", cfg.lambda1, "Sparsity weight");
  add_dbl("--alpha", cfg.alpha, "Inverse step size; 0 picks N/4");
  add_dbl("--h0-const", cfg.h0_const, "Initial-state constant");
  add_int("--mu-iters", cfg.mu_iters, "Multiplicative-update iterations");
  add_dbl("--learning-rate", cfg.learning_rate, "Adam learning rate");
  add_int("--batch-size", cfg.batch_size, "Training batch size");
  add_int("--max-seq-frames", cfg.max_seq_frames,
          "Training sequences are split to at most this many frames");
  add_int("--patience-epochs", cfg.patience_epochs, "Early-stopping patience");
  add_int("--max-epochs", cfg.max_epochs, "Training epoch cap");
  add_int("--n-utts", cfg.n_utts, "Utterances to synthesize");
  add_dbl("--duration-s", cfg.duration_s, "Synthesized utterance length");
  add_dbl("--val-fraction", cfg.val_fraction,
          "Validation share when no --val-manifest is given");
  app.add_option("--seed", cfg.seed, "Master RNG seed")->capture_default_str();
}

void echo_config(const PipelineConfig& cfg, const std::string& command,
                 const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream out(out_dir + "/config_used.cfg", std::ios::trunc);
  if (!out) throw IoError(out_dir + "/config_used.cfg: cannot open");
  char buf[64];
  auto put_dbl = [&](const char* k, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << k << " = " << buf << "\n";
  };
  out << "# effective configuration for `drnmf " << command << "`\n";
  out << "frame-size = " << cfg.frame_size << "\n";
  out << "hop = " << cfg.hop << "\n";
  out << "n-speech = " << cfg.n_speech << "\n";
  out << "n-noise = " << cfg.n_noise << "\n";
  out << "num-layers = " << cfg.num_layers << "\n";
  put_dbl("lambda1", cfg.lambda1);
  put_dbl("alpha", cfg.alpha);
  put_dbl("h0-const", cfg.h0_const);
  out << "mu-iters = " << cfg.mu_iters << "\n";
  put_dbl("learning-rate", cfg.learning_rate);
  out << "batch-size = " << cfg.batch_size << "\n";
  out << "max-seq-frames = " << cfg.max_seq_frames << "\n";
  out << "patience-epochs = " << cfg.patience_epochs << "\n";
  out << "max-epochs = " << cfg.max_epochs << "\n";
  out << "n-utts = " << cfg.n_utts << "\n";
  put_dbl("duration-s", cfg.duration_s);
  put_dbl("val-fraction", cfg.val_fraction);
  out << "seed = " << cfg.seed << "\n";
}

std::string parent_dir(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return dir.empty() ? std::string(".") : dir;
}

// ---- model files ----------------------------------------------------------

void save_dictionary_model(const std::string& path, const Dictionary& dict,
                           const PipelineConfig& cfg) {
  ArrayStore store;
  store.arrays.emplace_back("W", dict.W);
  store.set_meta("kind", "snmf");
  store.set_meta_int("n_speech", dict.n_speech);
  store.set_meta_int("n_noise", dict.n_noise);
  store.set_meta_double("lambda1", cfg.lambda1);
  store.set_meta_int("mu_iters", cfg.mu_iters);
  store.set_meta_int("frame_size", cfg.frame_size);
  store.set_meta_int("hop", cfg.hop);
  store.set_meta_int("seed", static_cast<long long>(cfg.seed));
  save_array_store(path, store);
}

Dictionary load_dictionary_model(const std::string& path, int* frame_size,
                                 int* hop) {
  const ArrayStore store = load_array_store(path);
  Dictionary dict;
  dict.W = store.array("W");
  dict.n_speech = static_cast<int>(store.meta_int("n_speech"));
  dict.n_noise = static_cast<int>(store.meta_int("n_noise"));
  if (frame_size) *frame_size = static_cast<int>(store.meta_int("frame_size"));
  if (hop) *hop = static_cast<int>(store.meta_int("hop"));
  return dict;
}

void save_drnmf_model(const std::string& path, const DrNmfParams& p,
                      const PipelineConfig& cfg, double alpha0,
                      int best_epoch = -1,
                      double best_val_loss =
                          std::numeric_limits<double>::quiet_NaN()) {
  ArrayStore store;
  for (int k = 0; k < p.num_layers(); ++k)
    store.arrays.emplace_back("W_log_" + std::to_string(k + 1), p.W_log[k]);
  for (int k = 0; k < p.num_layers(); ++k)
    store.arrays.emplace_back(
        "alpha_log_" + std::to_string(k + 1),
        Eigen::MatrixXd::Constant(1, 1, p.alpha_log[k]));
  store.arrays.emplace_back("h0_log", p.h0_log);
  store.set_meta("kind", "drnmf");
  store.set_meta_int("K", p.num_layers());
  store.set_meta_double("lambda1", p.lambda1);
  store.set_meta_int("n_speech", p.n_speech);
  store.set_meta_int("n_noise", p.n_noise);
  store.set_meta_double("epsilon_log", p.epsilon_log);
  store.set_meta_double("epsilon_mask", p.epsilon_mask);
  store.set_meta_double("alpha0", alpha0);
  store.set_meta_int("frame_size", cfg.frame_size);
  store.set_meta_int("hop", cfg.hop);
  store.set_meta_int("seed", static_cast<long long>(cfg.seed));
  if (best_epoch >= 0) {
    store.set_meta_int("best_epoch", best_epoch);
    store.set_meta_double("best_val_loss", best_val_loss);
  }
  save_array_store(path, store);
}

DrNmfParams load_drnmf_model(const std::string& path, int* frame_size,
                             int* hop) {
  const ArrayStore store = load_array_store(path);
  if (store.metadata.count("kind") && store.meta("kind") != "drnmf")
    throw IoError(path + ": not a drnmf network model");
  DrNmfParams p;
  const int K = static_cast<int>(store.meta_int("K"));
  p.alpha_log.resize(K);
  for (int k = 0; k < K; ++k) {
    p.W_log.push_back(store.array("W_log_" + std::to_string(k + 1)));
    p.alpha_log[k] = store.array("alpha_log_" + std::to_string(k + 1))(0, 0);
  }
  p.h0_log = store.array("h0_log").col(0);
  p.lambda1 = store.meta_double("lambda1");
  p.n_speech = static_cast<int>(store.meta_int("n_speech"));
  p.n_noise = static_cast<int>(store.meta_int("n_noise"));
  p.epsilon_log = store.meta_double("epsilon_log");
  p.epsilon_mask = store.meta_double("epsilon_mask");
  if (frame_size) *frame_size = static_cast<int>(store.meta_int("frame_size"));
  if (hop) *hop = static_cast<int>(store.meta_int("hop"));
  return p;
}

// ---- subcommands ----------------------------------------------------------

int cmd_synth(const PipelineConfig& cfg, const std::string& out_dir) {
  const auto entries =
      synth_corpus(cfg.n_utts, cfg.seed, cfg.duration_s, out_dir);
  echo_config(cfg, "synth", out_dir);
  std::printf("wrote %zu utterances to %s (manifest.csv)\n", entries.size(),
              out_dir.c_str());
  return 0;
}

int cmd_train_nmf(const PipelineConfig& cfg, const std::string& manifest_path,
                  const std::string& out_model) {
  const auto entries = read_manifest(manifest_path);
  std::vector<Eigen::MatrixXd> clean_mags, mix_mags;
  for (const auto& e : entries) {
    clean_mags.push_back(
        stft(read_wav(e.clean_path), cfg.frame_size, cfg.hop).magnitude);
    mix_mags.push_back(
        stft(read_wav(e.mix_path), cfg.frame_size, cfg.hop).magnitude);
  }

  SnmfConfig scfg;
  scfg.lambda1 = cfg.lambda1;
  scfg.n_iters = cfg.mu_iters;
  scfg.seed = cfg.seed;
  scfg.progress_every = 10;
  scfg.progress = [](int it, double obj) {
    std::printf("  iter %4d  objective %.6f\n", it, obj);
  };

  std::printf("training speech dictionary (%d columns)\n", cfg.n_speech);
  const Dictionary speech = train_speech_dict(clean_mags, cfg.n_speech, scfg);
  std::printf("training noise dictionary (%d columns, speech frozen)\n",
              cfg.n_noise);
  const Dictionary full =
      train_noise_dict(mix_mags, speech, cfg.n_noise, scfg);

  save_dictionary_model(out_model, full, cfg);
  echo_config(cfg, "train-nmf", parent_dir(out_model));

  // Final objective on the noisy corpus with fresh activations.
  Eigen::Index total_cols = 0;
  for (const auto& m : mix_mags) total_cols += m.cols();
  Eigen::MatrixXd X(mix_mags[0].rows(), total_cols);
  Eigen::Index at = 0;
  for (const auto& m : mix_mags) {
    X.middleCols(at, m.cols()) = m;
    at += m.cols();
  }
  SnmfConfig icfg = scfg;
  icfg.progress = nullptr;
  const Eigen::MatrixXd H = infer_h_mu(X, full, icfg);
  std::printf("final objective %.6f; model written to %s\n",
              snmf_objective(X, full.W, H, cfg.lambda1), out_model.c_str());
  return 0;
}

int cmd_train_drnmf(const PipelineConfig& cfg,
                    const std::string& manifest_path,
                    const std::string& val_manifest_path,
                    const std::string& nmf_model,
                    const std::string& out_model) {
  const Dictionary dict = load_dictionary_model(nmf_model, nullptr, nullptr);
  const double alpha0 = cfg.effective_alpha(dict.size());
  DrNmfParams init = initialize_from_snmf(dict, cfg.lambda1, cfg.num_layers,
                                          alpha0, cfg.h0_const);

  auto train_entries = read_manifest(manifest_path);
  std::vector<CorpusEntry> val_entries;
  if (!val_manifest_path.empty()) {
    val_entries = read_manifest(val_manifest_path);
  } else {
    // Deterministic tail split.
    const size_t n_val = std::max<size_t>(
        1, static_cast<size_t>(train_entries.size() * cfg.val_fraction));
    val_entries.assign(train_entries.end() - n_val, train_entries.end());
    train_entries.resize(train_entries.size() - n_val);
  }
  const auto train_set = load_supervised_examples(
      train_entries, cfg.frame_size, cfg.hop, cfg.max_seq_frames);
  const auto val_set = load_supervised_examples(
      val_entries, cfg.frame_size, cfg.hop, cfg.max_seq_frames);

  // Interpretability check: at initialization the network must reproduce
  // the warm-start solver it unfolds.
  {
    const RealizedWeights r = realize_weights(init);
    IstaConfig icfg;
    icfg.alpha = r.alpha[0];
    icfg.lambda1 = init.lambda1;
    icfg.n_iters = init.num_layers();
    const Eigen::MatrixXd& X = val_set.front().X;
    const Eigen::MatrixXd H_net = forward(init, X).H;
    const Eigen::MatrixXd H_solver = warm_start_ista(X, r.W[0], r.h0, icfg);
    const double diff = (H_net - H_solver).cwiseAbs().maxCoeff();
    std::printf("initialization equivalence: max state diff %.3e (%s)\n",
                diff, diff < 1e-12 ? "PASS" : "FAIL");
    if (diff >= 1e-12) return 2;
  }

  TrainConfig tcfg;
  tcfg.batch_size = cfg.batch_size;
  tcfg.max_seq_frames = cfg.max_seq_frames;
  tcfg.patience_epochs = cfg.patience_epochs;
  tcfg.max_epochs = cfg.max_epochs;
  tcfg.shuffle_seed = cfg.seed;
  tcfg.adam.learning_rate = cfg.learning_rate;
  tcfg.progress = [](const EpochRecord& r) {
    std::printf("epoch %4d  train %.6f  val %.6f  (%.1fs)\n", r.epoch,
                r.train_loss, r.val_loss, r.seconds);
    std::fflush(stdout);
  };

  const TrainResult result = train_loop(init, train_set, val_set, tcfg);
  save_drnmf_model(out_model, result.best_params, cfg, alpha0,
                   result.best_epoch, result.best_val_loss);
  write_history_csv(out_model + ".history.csv", result.history);
  echo_config(cfg, "train-drnmf", parent_dir(out_model));
  std::printf(
      "best val loss %.6f at epoch %d (%zu epochs run); model %s\n",
      result.best_val_loss, result.best_epoch, result.history.size(),
      out_model.c_str());
  return 0;
}

MaskMode parse_mask_mode(const std::string& mode) {
  if (mode == "model") return MaskMode::kModel;
  if (mode == "identity") return MaskMode::kIdentity;
  if (mode == "zero") return MaskMode::kZero;
  throw std::invalid_argument("--mask-mode must be model|identity|zero");
}

int cmd_separate(const std::string& model_path, const std::string& in_wav,
                 const std::string& out_wav, const std::string& mask_mode) {
  int frame_size = 512, hop = 128;
  const DrNmfParams p = load_drnmf_model(model_path, &frame_size, &hop);
  const Waveform noisy = read_wav(in_wav);
  const Waveform out =
      separate(p, noisy, frame_size, hop, parse_mask_mode(mask_mode));
  const int clipped = write_wav(out_wav, out);
  if (clipped > 0)
    std::fprintf(stderr, "warning: %d samples clipped on write\n", clipped);
  std::printf("wrote %s (%d samples)\n", out_wav.c_str(), out.num_samples());
  return 0;
}

int cmd_evaluate(const PipelineConfig& cfg, const std::string& model_path,
                 const std::string& manifest_path, const std::string& out_csv,
                 const std::string& estimate_kind) {
  const auto entries = read_manifest(manifest_path);

  const bool use_model = estimate_kind == "model";
  if (use_model && model_path.empty())
    throw std::invalid_argument("--model is required with --estimate model");
  bool is_drnmf = true;
  DrNmfParams net;
  Dictionary dict;
  int frame_size = cfg.frame_size, hop = cfg.hop;
  if (use_model) {
    const ArrayStore probe = load_array_store(model_path);
    is_drnmf = !probe.metadata.count("kind") || probe.meta("kind") == "drnmf";
    if (is_drnmf)
      net = load_drnmf_model(model_path, &frame_size, &hop);
    else
      dict = load_dictionary_model(model_path, &frame_size, &hop);
  }

  std::ofstream out(out_csv, std::ios::trunc);
  if (!out) throw IoError(out_csv + ": cannot open for writing");
  out << "utt_id,snr_db,sdr_db\n";

  std::map<double, std::pair<double, int>> by_snr;
  double total = 0.0;
  char buf[128];
  for (const auto& e : entries) {
    const Waveform clean = read_wav(e.clean_path);
    const Waveform mix = read_wav(e.mix_path);
    Waveform estimate;
    if (!use_model) {
      estimate = estimate_kind == "clean" ? clean : mix;
    } else if (is_drnmf) {
      estimate = separate(net, mix, frame_size, hop);
    } else {
      // Multiplicative-update inference, masked reconstruction.
      const Spectrogram s = stft(mix, frame_size, hop);
      SnmfConfig scfg;
      scfg.lambda1 = cfg.lambda1;
      scfg.n_iters = cfg.mu_iters;
      scfg.seed = cfg.seed;
      const Eigen::MatrixXd H = infer_h_mu(s.magnitude, dict, scfg);
      const Eigen::MatrixXd y_hat =
          dict.speech_block() * H.topRows(dict.n_speech);
      const Eigen::MatrixXd v_hat =
          dict.noise_block() * H.bottomRows(dict.n_noise);
      const Eigen::MatrixXd mask = compute_mask(y_hat, v_hat, 1e-12);
      Spectrogram masked = s;
      masked.complex_stft =
          s.complex_stft.cwiseProduct(mask.cast<std::complex<double>>());
      estimate = istft(masked);
    }
    Waveform ref = clean;
    ref.samples.resize(estimate.samples.size());
    const double value = sdr(ref, estimate);
    std::snprintf(buf, sizeof(buf), "%s,%g,%.4f\n", e.utt_id.c_str(),
                  e.snr_db, value);
    out << buf;
    by_snr[e.snr_db].first += value;
    by_snr[e.snr_db].second += 1;
    total += value;
  }
  for (const auto& [snr, acc] : by_snr) {
    std::snprintf(buf, sizeof(buf), "mean_snr_%g,%g,%.4f\n", snr, snr,
                  acc.first / acc.second);
    out << buf;
  }
  const double mean_all = total / entries.size();
  std::snprintf(buf, sizeof(buf), "mean_all,,%.4f\n", mean_all);
  out << buf;
  std::printf("mean SDR %.4f dB over %zu utterances; table %s\n", mean_all,
              entries.size(), out_csv.c_str());
  return 0;
}

int cmd_solve(const PipelineConfig& cfg, const std::string& in_wav,
              int n_basis, int k_iters) {
  Eigen::MatrixXd X;
  if (!in_wav.empty()) {
    X = stft(read_wav(in_wav), cfg.frame_size, cfg.hop).magnitude;
  } else {
    // Slowly varying synthetic magnitudes.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int F = cfg.frame_size / 2 + 1;
    X.resize(F, 100);
    Eigen::VectorXd base(F);
    for (int f = 0; f < F; ++f) base[f] = uni(rng);
    for (int t = 0; t < X.cols(); ++t) {
      for (int f = 0; f < F; ++f)
        base[f] = std::max(0.0, base[f] + 0.05 * (uni(rng) - 0.5));
      X.col(t) = base;
    }
  }

  const Eigen::MatrixXd W =
      random_dictionary(static_cast<int>(X.rows()), n_basis, cfg.seed);
  IstaConfig icfg;
  icfg.lambda1 = cfg.lambda1;
  icfg.alpha = cfg.effective_alpha(n_basis);
  icfg.n_iters = k_iters;
  const Eigen::VectorXd h0 = Eigen::VectorXd::Constant(n_basis, cfg.h0_const);

  auto objective = [&](const Eigen::MatrixXd& H) {
    double total = 0.0;
    for (int t = 0; t < X.cols(); ++t)
      total += 0.5 * (X.col(t) - W * H.col(t)).squaredNorm() +
               icfg.lambda1 * H.col(t).sum();
    return total;
  };

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  const Eigen::MatrixXd H_warm = warm_start_ista(X, W, h0, icfg);
  const double warm_s =
      std::chrono::duration<double>(clock::now() - t0).count();

  t0 = clock::now();
  Eigen::MatrixXd H_cold(n_basis, X.cols());
  for (int t = 0; t < X.cols(); ++t)
    H_cold.col(t) = ista(X.col(t), W, Eigen::VectorXd::Zero(n_basis), icfg);
  const double cold_s =
      std::chrono::duration<double>(clock::now() - t0).count();

  std::printf("frames %ld, N %d, K %d, alpha %.3f\n",
              static_cast<long>(X.cols()), n_basis, k_iters, icfg.alpha);
  std::printf("warm start: objective %.6f  (%.3fs)\n", objective(H_warm),
              warm_s);
  std::printf("cold start: objective %.6f  (%.3fs)\n", objective(H_cold),
              cold_s);
  return 0;
}

int cmd_gradcheck(const PipelineConfig& cfg, int F, int n_speech, int n_noise,
                  int K, int T, int probes, bool corrupt) {
  const Dictionary dict{random_dictionary(F, n_speech + n_noise, cfg.seed),
                        n_speech, n_noise};
  const DrNmfParams p = initialize_from_snmf(
      dict, cfg.lambda1, K, alpha_coherence_bound(dict.W), cfg.h0_const);
  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> uni(0.0, 2.0);
  Eigen::MatrixXd X(F, T), Y(F, T);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = uni(rng);
  for (Eigen::Index i = 0; i < Y.size(); ++i) Y(i) = uni(rng);

  BackwardOptions opts;
  opts.corrupt_alpha_term = corrupt;
  const GradCheckReport report =
      gradient_check(p, X, Y, probes, cfg.seed + 2, 1e-5, opts);

  std::printf("%-12s %-14s %-14s %-14s %s\n", "tensor", "max rel err",
              "analytic", "numeric", "worst coord");
  for (const auto& t : report.tensors)
    std::printf("%-12s %-14.3e %-14.6e %-14.6e %s\n", t.name.c_str(),
                t.max_rel_err, t.analytic, t.numeric, t.worst_coord.c_str());
  const bool pass = report.passed(1e-5);
  std::printf("gradcheck %s (max relative error %.3e, threshold 1e-5)\n",
              pass ? "PASS" : "FAIL", report.max_rel_err);
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep recurrent NMF speech separation pipeline"};
  app.require_subcommand(1);
  // Config keys are top-level options; let them appear after the subcommand.
  app.fallthrough(true);
  PipelineConfig cfg;
  add_config_options(app, cfg);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  std::string out_dir;
  synth->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* train_nmf =
      app.add_subcommand("train-nmf", "Train the sparse NMF dictionaries");
  std::string manifest, out_model;
  train_nmf->add_option("--manifest", manifest, "Corpus manifest CSV")
      ->required();
  train_nmf->add_option("--out", out_model, "Output model path")->required();

  auto* train_drnmf =
      app.add_subcommand("train-drnmf", "Train the unfolded network");
  std::string val_manifest, nmf_model;
  train_drnmf->add_option("--manifest", manifest, "Training manifest CSV")
      ->required();
  train_drnmf->add_option("--val-manifest", val_manifest,
                          "Validation manifest CSV (default: tail split)");
  train_drnmf->add_option("--nmf-model", nmf_model, "Dictionary model")
      ->required();
  train_drnmf->add_option("--out", out_model, "Output model path")->required();

  auto* separate_cmd = app.add_subcommand("separate", "Separate one mixture");
  std::string model_path, in_wav, out_wav, mask_mode = "model";
  separate_cmd->add_option("--model", model_path, "Network model")->required();
  separate_cmd->add_option("--in", in_wav, "Input WAV")->required();
  separate_cmd->add_option("--out", out_wav, "Output WAV")->required();
  separate_cmd->add_option("--mask-mode", mask_mode, "model|identity|zero")
      ->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "SDR table over a manifest");
  std::string eval_csv, estimate_kind = "model";
  evaluate->add_option("--model", model_path,
                       "Network or dictionary model (with --estimate model)");
  evaluate->add_option("--manifest", manifest, "Corpus manifest CSV")
      ->required();
  evaluate->add_option("--out", eval_csv, "Output CSV path")->required();
  evaluate
      ->add_option("--estimate", estimate_kind,
                   "model|mixture|clean estimate source")
      ->capture_default_str();

  auto* solve = app.add_subcommand(
      "solve", "Benchmark warm-start against cold-start ISTA");
  int n_basis = 64, k_iters = 5;
  std::string solve_wav;
  solve->add_option("--in", solve_wav, "Input WAV (default: synthetic)");
  solve->add_option("--n", n_basis, "Dictionary columns")
      ->capture_default_str();
  solve->add_option("--k", k_iters, "Iterations per frame")
      ->capture_default_str();

  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Check gradients against finite differences");
  int gc_f = 9, gc_speech = 3, gc_noise = 3, gc_k = 2, gc_t = 5,
      gc_probes = 50;
  bool gc_corrupt = false;
  gradcheck->add_option("--f", gc_f, "Frequency bins")->capture_default_str();
  gradcheck->add_option("--gc-n-speech", gc_speech, "Speech columns")
      ->capture_default_str();
  gradcheck->add_option("--gc-n-noise", gc_noise, "Noise columns")
      ->capture_default_str();
  gradcheck->add_option("--k", gc_k, "Layers")->capture_default_str();
  gradcheck->add_option("--frames", gc_t, "Frames")->capture_default_str();
  gradcheck->add_option("--probes", gc_probes, "Coordinates per tensor")
      ->capture_default_str();
  gradcheck->add_flag("--corrupt", gc_corrupt,
                      "Negate one gradient term (checker self-test)");

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return cmd_synth(cfg, out_dir);
    if (train_nmf->parsed()) return cmd_train_nmf(cfg, manifest, out_model);
    if (train_drnmf->parsed())
      return cmd_train_drnmf(cfg, manifest, val_manifest, nmf_model,
                             out_model);
    if (separate_cmd->parsed())
      return cmd_separate(model_path, in_wav, out_wav, mask_mode);
    if (evaluate->parsed())
      return cmd_evaluate(cfg, model_path, manifest, eval_csv, estimate_kind);
    if (solve->parsed()) return cmd_solve(cfg, solve_wav, n_basis, k_iters);
    if (gradcheck->parsed())
      return cmd_gradcheck(cfg, gc_f, gc_speech, gc_noise, gc_k, gc_t,
                           gc_probes, gc_corrupt);
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

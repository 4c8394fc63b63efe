// src/python/bindings.cc

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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drnmf/common.h"
#include "drnmf/corpus.h"
#include "drnmf/ista.h"
#include "drnmf/model_io.h"
#include "drnmf/network.h"
#include "drnmf/signal.h"
#include "drnmf/snmf.h"
#include "drnmf/train.h"
#include "drnmf/wav_io.h"

namespace py = pybind11;
using namespace drnmf;

namespace {

Waveform waveform_from_array(const Eigen::VectorXd& samples) {
  Waveform w;
  w.samples.assign(samples.data(), samples.data() + samples.size());
  return w;
}

Eigen::VectorXd array_from_waveform(const Waveform& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.samples.data(),
                                           w.samples.size());
}

}  // namespace

PYBIND11_MODULE(_drnmf, m) {
  m.doc() = "Deep recurrent NMF speech separation: sparse NMF dictionaries, "
            "warm-start ISTA, the unfolded trainable network, and training "
            "utilities.";

  py::register_exception<NumericError>(m, "NumericError");
  py::register_exception<IoError>(m, "IoError");

  m.attr("SAMPLE_RATE") = kSampleRate;
  m.attr("SDR_PERFECT") = kSdrPerfect;

  // ---- signal ---------------------------------------------------------
  m.def("sqrt_hann_window", &sqrt_hann_window, py::arg("size"));
  m.def(
      "stft",
      [](const Eigen::VectorXd& samples, int frame_size, int hop) {
        const Spectrogram s =
            stft(waveform_from_array(samples), frame_size, hop);
        return py::make_tuple(s.complex_stft, s.magnitude);
      },
      py::arg("samples"), py::arg("frame_size") = kDefaultFrameSize,
      py::arg("hop") = kDefaultHop,
      "Returns (complex_stft, magnitude), both F x T.");
  m.def(
      "istft",
      [](const Eigen::MatrixXcd& complex_stft, int frame_size, int hop) {
        Spectrogram s;
        s.complex_stft = complex_stft;
        s.magnitude = complex_stft.cwiseAbs();
        s.frame_size = frame_size;
        s.hop = hop;
        return array_from_waveform(istft(s));
      },
      py::arg("complex_stft"), py::arg("frame_size") = kDefaultFrameSize,
      py::arg("hop") = kDefaultHop);
  m.def(
      "mix_at_snr",
      [](const Eigen::VectorXd& clean, const Eigen::VectorXd& noise,
         double snr_db) {
        const MixResult r = mix_at_snr(waveform_from_array(clean),
                                       waveform_from_array(noise), snr_db);
        return py::make_tuple(array_from_waveform(r.mixture),
                              array_from_waveform(r.scaled_noise), r.gain);
      },
      py::arg("clean"), py::arg("noise"), py::arg("snr_db"),
      "Returns (mixture, scaled_noise, gain).");
  m.def(
      "sdr",
      [](const Eigen::VectorXd& reference, const Eigen::VectorXd& estimate) {
        return sdr(waveform_from_array(reference),
                   waveform_from_array(estimate));
      },
      py::arg("reference"), py::arg("estimate"));
  m.def(
      "read_wav",
      [](const std::string& path) {
        return array_from_waveform(read_wav(path));
      },
      py::arg("path"));
  m.def(
      "write_wav",
      [](const std::string& path, const Eigen::VectorXd& samples) {
        return write_wav(path, waveform_from_array(samples));
      },
      py::arg("path"), py::arg("samples"),
      "Returns the number of clipped samples.");

  // ---- corpus ---------------------------------------------------------
  py::class_<CorpusEntry>(m, "CorpusEntry")
      .def_readonly("utt_id", &CorpusEntry::utt_id)
      .def_readonly("snr_db", &CorpusEntry::snr_db)
      .def_readonly("clean_path", &CorpusEntry::clean_path)
      .def_readonly("noise_path", &CorpusEntry::noise_path)
      .def_readonly("mix_path", &CorpusEntry::mix_path);
  m.def("synth_corpus", &synth_corpus, py::arg("n_utts"), py::arg("seed"),
        py::arg("duration_s"), py::arg("out_dir"));
  m.def("read_manifest", &read_manifest, py::arg("path"));

  // ---- snmf -----------------------------------------------------------
  py::class_<Dictionary>(m, "Dictionary")
      .def(py::init([](const Eigen::MatrixXd& W, int n_speech, int n_noise) {
             return Dictionary{W, n_speech, n_noise};
           }),
           py::arg("W"), py::arg("n_speech"), py::arg("n_noise"))
      .def_readwrite("W", &Dictionary::W)
      .def_readwrite("n_speech", &Dictionary::n_speech)
      .def_readwrite("n_noise", &Dictionary::n_noise)
      .def_property_readonly("size", &Dictionary::size);

  py::class_<SnmfConfig>(m, "SnmfConfig")
      .def(py::init<>())
      .def_readwrite("lambda1", &SnmfConfig::lambda1)
      .def_readwrite("n_iters", &SnmfConfig::n_iters)
      .def_readwrite("epsilon_mu", &SnmfConfig::epsilon_mu)
      .def_readwrite("seed", &SnmfConfig::seed);

  m.def("snmf_objective", &snmf_objective, py::arg("X"), py::arg("W"),
        py::arg("H"), py::arg("lambda1"));
  m.def(
      "mu_step",
      [](const Eigen::MatrixXd& X, Eigen::MatrixXd W, Eigen::MatrixXd H,
         double lambda1, double epsilon_mu, const std::vector<bool>& mask) {
        mu_step(X, W, H, lambda1, epsilon_mu, mask);
        return py::make_tuple(W, H);
      },
      py::arg("X"), py::arg("W"), py::arg("H"), py::arg("lambda1") = 0.1,
      py::arg("epsilon_mu") = 1e-12,
      py::arg("update_cols") = std::vector<bool>{},
      "Returns the updated (W, H).");
  m.def("random_dictionary", &random_dictionary, py::arg("n_bins"),
        py::arg("n_cols"), py::arg("seed"));
  m.def("train_speech_dict", &train_speech_dict, py::arg("clean_mags"),
        py::arg("n_speech"), py::arg("config"));
  m.def("train_noise_dict", &train_noise_dict, py::arg("noisy_mags"),
        py::arg("speech"), py::arg("n_noise"), py::arg("config"));
  m.def("infer_h_mu", &infer_h_mu, py::arg("X"), py::arg("dictionary"),
        py::arg("config"));

  // ---- ista -----------------------------------------------------------
  py::class_<IstaConfig>(m, "IstaConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &IstaConfig::alpha)
      .def_readwrite("lambda1", &IstaConfig::lambda1)
      .def_readwrite("n_iters", &IstaConfig::n_iters)
      .def_readwrite("nonnegative", &IstaConfig::nonnegative);

  m.def(
      "soft_threshold",
      [](const Eigen::VectorXd& z, double b, bool nonnegative) {
        return soft_threshold(z, b, nonnegative);
      },
      py::arg("z"), py::arg("b"), py::arg("nonnegative") = true);
  m.def("ista", &ista, py::arg("x"), py::arg("W"), py::arg("h0"),
        py::arg("config"));
  m.def("warm_start_ista", &warm_start_ista, py::arg("X"), py::arg("W"),
        py::arg("h0"), py::arg("config"));
  m.def("alpha_heuristic", &alpha_heuristic, py::arg("n_basis"));
  m.def("alpha_coherence_bound", &alpha_coherence_bound, py::arg("W"));
  m.def("lipschitz_estimate", &lipschitz_estimate, py::arg("W"),
        py::arg("n_iters") = 200);

  // ---- network ----------------------------------------------------------
  py::class_<DrNmfParams>(m, "DrNmfParams")
      .def(py::init<>())
      .def_readwrite("W_log", &DrNmfParams::W_log)
      .def_readwrite("alpha_log", &DrNmfParams::alpha_log)
      .def_readwrite("h0_log", &DrNmfParams::h0_log)
      .def_readwrite("lambda1", &DrNmfParams::lambda1)
      .def_readwrite("n_speech", &DrNmfParams::n_speech)
      .def_readwrite("n_noise", &DrNmfParams::n_noise)
      .def_readwrite("epsilon_log", &DrNmfParams::epsilon_log)
      .def_readwrite("epsilon_mask", &DrNmfParams::epsilon_mask)
      .def_property_readonly("num_layers", &DrNmfParams::num_layers);

  py::class_<ForwardTrace>(m, "ForwardTrace")
      .def_readonly("H", &ForwardTrace::H)
      .def_readonly("y_hat", &ForwardTrace::y_hat)
      .def_readonly("v_hat", &ForwardTrace::v_hat)
      .def_readonly("mask", &ForwardTrace::mask)
      .def_readonly("output", &ForwardTrace::output)
      .def_readonly("states", &ForwardTrace::states);

  m.def(
      "realize_weights",
      [](const DrNmfParams& p) {
        const RealizedWeights r = realize_weights(p);
        return py::make_tuple(r.W, r.alpha, r.h0);
      },
      py::arg("params"), "Returns (W_list, alpha, h0).");
  m.def("forward", &forward, py::arg("params"), py::arg("X"));
  m.def("compute_mask", &compute_mask, py::arg("y_hat"), py::arg("v_hat"),
        py::arg("epsilon_mask") = 1e-12);
  m.def("signal_approx_loss", &signal_approx_loss, py::arg("Y"), py::arg("X"),
        py::arg("mask"));

  py::enum_<MaskMode>(m, "MaskMode")
      .value("MODEL", MaskMode::kModel)
      .value("IDENTITY", MaskMode::kIdentity)
      .value("ZERO", MaskMode::kZero);
  m.def(
      "separate",
      [](const DrNmfParams& p, const Eigen::VectorXd& noisy, int frame_size,
         int hop, MaskMode mode) {
        return array_from_waveform(
            separate(p, waveform_from_array(noisy), frame_size, hop, mode));
      },
      py::arg("params"), py::arg("noisy"),
      py::arg("frame_size") = kDefaultFrameSize, py::arg("hop") = kDefaultHop,
      py::arg("mask_mode") = MaskMode::kModel);

  // ---- train ------------------------------------------------------------
  py::class_<Gradients>(m, "Gradients")
      .def_readonly("W_log", &Gradients::W_log)
      .def_readonly("alpha_log", &Gradients::alpha_log)
      .def_readonly("h0_log", &Gradients::h0_log);

  m.def(
      "backward",
      [](const DrNmfParams& p, const Eigen::MatrixXd& X,
         const Eigen::MatrixXd& Y) {
        const BackwardResult r = backward(p, X, Y, forward(p, X));
        return py::make_tuple(r.loss, r.grad);
      },
      py::arg("params"), py::arg("X"), py::arg("Y"),
      "Runs forward then reverse mode; returns (loss, gradients).");

  py::class_<AdamConfig>(m, "AdamConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &AdamConfig::learning_rate)
      .def_readwrite("beta1", &AdamConfig::beta1)
      .def_readwrite("beta2", &AdamConfig::beta2)
      .def_readwrite("epsilon", &AdamConfig::epsilon);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("max_seq_frames", &TrainConfig::max_seq_frames)
      .def_readwrite("patience_epochs", &TrainConfig::patience_epochs)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("shuffle_seed", &TrainConfig::shuffle_seed)
      .def_readwrite("adam", &TrainConfig::adam);

  py::class_<EpochRecord>(m, "EpochRecord")
      .def_readonly("epoch", &EpochRecord::epoch)
      .def_readonly("train_loss", &EpochRecord::train_loss)
      .def_readonly("val_loss", &EpochRecord::val_loss)
      .def_readonly("seconds", &EpochRecord::seconds);

  m.def("initialize_from_snmf", &initialize_from_snmf, py::arg("dictionary"),
        py::arg("lambda1"), py::arg("K"), py::arg("alpha0"),
        py::arg("h0_const"), py::arg("epsilon_log") = 1e-8,
        py::arg("epsilon_mask") = 1e-12);
  m.def(
      "train_loop",
      [](const DrNmfParams& init,
         const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
             train_pairs,
         const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>&
             val_pairs,
         const TrainConfig& cfg) {
        auto to_set = [](const auto& pairs) {
          std::vector<SupervisedExample> set;
          for (const auto& [x, y] : pairs) set.push_back({x, y});
          return set;
        };
        const TrainResult r =
            train_loop(init, to_set(train_pairs), to_set(val_pairs), cfg);
        return py::make_tuple(r.best_params, r.history, r.best_val_loss,
                              r.best_epoch);
      },
      py::arg("init"), py::arg("train_set"), py::arg("val_set"),
      py::arg("config"),
      "Datasets are lists of (noisy_mag, clean_mag) pairs; returns "
      "(best_params, history, best_val_loss, best_epoch).");
  m.def(
      "gradient_check",
      [](const DrNmfParams& p, const Eigen::MatrixXd& X,
         const Eigen::MatrixXd& Y, int probes, std::uint64_t seed) {
        const GradCheckReport r = gradient_check(p, X, Y, probes, seed);
        py::list tensors;
        for (const auto& t : r.tensors)
          tensors.append(py::make_tuple(t.name, t.max_rel_err));
        return py::make_tuple(r.max_rel_err, tensors);
      },
      py::arg("params"), py::arg("X"), py::arg("Y"), py::arg("probes") = 50,
      py::arg("seed") = 0,
      "Returns (max_rel_err, [(tensor, max_rel_err), ...]).");
}

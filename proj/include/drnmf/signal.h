// include/drnmf/signal.h

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

#ifndef DRNMF_SIGNAL_H_
#define DRNMF_SIGNAL_H_

#include <vector>

#include <Eigen/Dense>

namespace drnmf {

constexpr int kSampleRate = 16000;
constexpr int kDefaultFrameSize = 512;
constexpr int kDefaultHop = 128;

// SDR value reported when the estimate matches the reference exactly.
constexpr double kSdrPerfect = 300.0;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  int num_samples() const { return static_cast<int>(samples.size()); }
};

// Complex STFT and its magnitude, column t = frame t.
struct Spectrogram {
  Eigen::MatrixXcd complex_stft;  // F x T
  Eigen::MatrixXd magnitude;      // F x T, |complex_stft|
  int frame_size = kDefaultFrameSize;
  int hop = kDefaultHop;

  int num_bins() const { return static_cast<int>(complex_stft.rows()); }
  int num_frames() const { return static_cast<int>(complex_stft.cols()); }
};

// Square root of the periodic (DFT-even) Hann window, used for both
// analysis and synthesis.
Eigen::VectorXd sqrt_hann_window(int size);

// Frames start at sample 0 and advance by `hop`; the trailing partial frame
// is dropped. F = frame_size/2 + 1.
Spectrogram stft(const Waveform& w, int frame_size = kDefaultFrameSize,
                 int hop = kDefaultHop);

// Weighted overlap-add with the same sqrt-Hann window. The reconstruction
// is exact (to rounding) wherever the accumulated window energy is nonzero;
// callers comparing against the input should exclude the first and last
// (frame_size - hop) samples where overlap is incomplete.
Waveform istft(const Spectrogram& s);

// Number of output samples istft produces for a signal of `num_samples`.
int stft_covered_samples(int num_samples, int frame_size, int hop);

struct MixResult {
  Waveform mixture;
  Waveform scaled_noise;
  double gain = 0.0;  // factor applied to the noise
};

// Scales `noise` so that 10*log10(||clean||^2 / ||g*noise||^2) = snr_db and
// returns clean + scaled noise.
MixResult mix_at_snr(const Waveform& clean, const Waveform& noise,
                     double snr_db);

// 10*log10(sum(ref^2) / sum((ref - est)^2)); kSdrPerfect when the error
// energy is exactly zero.
double sdr(const Waveform& reference, const Waveform& estimate);

}  // namespace drnmf

#endif  // DRNMF_SIGNAL_H_

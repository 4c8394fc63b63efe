// src/signal.cc

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

#include "drnmf/signal.h"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "drnmf/common.h"

namespace drnmf {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_frame_params(int frame_size, int hop) {
  if (frame_size <= 0 || frame_size % 2 != 0)
    throw std::invalid_argument("frame_size must be a positive even number");
  if (hop <= 0 || frame_size % hop != 0)
    throw std::invalid_argument("hop must be positive and divide frame_size");
}

}  // namespace

Eigen::VectorXd sqrt_hann_window(int size) {
  Eigen::VectorXd w(size);
  for (int n = 0; n < size; ++n)
    w[n] = std::sqrt(0.5 * (1.0 - std::cos(2.0 * kPi * n / size)));
  return w;
}

int stft_covered_samples(int num_samples, int frame_size, int hop) {
  if (num_samples < frame_size) return 0;
  const int frames = (num_samples - frame_size) / hop + 1;
  return (frames - 1) * hop + frame_size;
}

Spectrogram stft(const Waveform& w, int frame_size, int hop) {
  check_frame_params(frame_size, hop);
  if (w.samples.empty()) throw std::invalid_argument("empty signal");
  if (w.num_samples() < frame_size)
    throw std::invalid_argument("signal shorter than one frame");

  const int n_frames = (w.num_samples() - frame_size) / hop + 1;
  const int n_bins = frame_size / 2 + 1;
  const Eigen::VectorXd window = sqrt_hann_window(frame_size);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  Spectrogram s;
  s.frame_size = frame_size;
  s.hop = hop;
  s.complex_stft.resize(n_bins, n_frames);
  s.magnitude.resize(n_bins, n_frames);

  std::vector<double> frame(frame_size);
  std::vector<std::complex<double>> spectrum;
  for (int t = 0; t < n_frames; ++t) {
    const int start = t * hop;
    for (int n = 0; n < frame_size; ++n)
      frame[n] = window[n] * w.samples[start + n];
    fft.fwd(spectrum, frame);
    for (int f = 0; f < n_bins; ++f) {
      s.complex_stft(f, t) = spectrum[f];
      s.magnitude(f, t) = std::abs(spectrum[f]);
    }
  }
  return s;
}

Waveform istft(const Spectrogram& s) {
  check_frame_params(s.frame_size, s.hop);
  const int n_frames = s.num_frames();
  const int n_bins = s.num_bins();
  if (n_bins != s.frame_size / 2 + 1)
    throw std::invalid_argument("spectrogram bins inconsistent with frame_size");

  const int out_len = (n_frames - 1) * s.hop + s.frame_size;
  const Eigen::VectorXd window = sqrt_hann_window(s.frame_size);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  std::vector<double> num(out_len, 0.0);
  std::vector<double> den(out_len, 0.0);
  std::vector<std::complex<double>> spectrum(n_bins);
  std::vector<double> frame(s.frame_size);
  for (int t = 0; t < n_frames; ++t) {
    for (int f = 0; f < n_bins; ++f) spectrum[f] = s.complex_stft(f, t);
    fft.inv(frame, spectrum, s.frame_size);
    const int start = t * s.hop;
    for (int n = 0; n < s.frame_size; ++n) {
      num[start + n] += window[n] * frame[n];
      den[start + n] += window[n] * window[n];
    }
  }

  Waveform out;
  out.samples.resize(out_len);
  for (int n = 0; n < out_len; ++n)
    out.samples[n] = den[n] > 1e-12 ? num[n] / den[n] : 0.0;
  return out;
}

MixResult mix_at_snr(const Waveform& clean, const Waveform& noise,
                     double snr_db) {
  if (clean.num_samples() != noise.num_samples())
    throw std::invalid_argument("mix_at_snr: length mismatch");
  double e_clean = 0.0, e_noise = 0.0;
  for (double v : clean.samples) e_clean += v * v;
  for (double v : noise.samples) e_noise += v * v;
  if (e_clean <= 0.0) throw std::invalid_argument("mix_at_snr: clean signal has zero energy");
  if (e_noise <= 0.0) throw std::invalid_argument("mix_at_snr: noise signal has zero energy");

  const double gain =
      std::sqrt(e_clean / e_noise) * std::pow(10.0, -snr_db / 20.0);

  MixResult r;
  r.gain = gain;
  r.scaled_noise.samples.resize(noise.samples.size());
  r.mixture.samples.resize(noise.samples.size());
  for (size_t i = 0; i < noise.samples.size(); ++i) {
    r.scaled_noise.samples[i] = gain * noise.samples[i];
    r.mixture.samples[i] = clean.samples[i] + r.scaled_noise.samples[i];
  }
  return r;
}

double sdr(const Waveform& reference, const Waveform& estimate) {
  if (reference.num_samples() != estimate.num_samples())
    throw std::invalid_argument("sdr: length mismatch");
  double e_ref = 0.0, e_err = 0.0;
  for (size_t i = 0; i < reference.samples.size(); ++i) {
    const double r = reference.samples[i];
    const double d = r - estimate.samples[i];
    e_ref += r * r;
    e_err += d * d;
  }
  if (e_ref <= 0.0) throw std::invalid_argument("sdr: reference has zero energy");
  if (e_err == 0.0) return kSdrPerfect;
  return 10.0 * std::log10(e_ref / e_err);
}

}  // namespace drnmf

// src/network.cc

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

#include "drnmf/network.h"

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

#include "drnmf/common.h"
#include "drnmf/ista.h"

namespace drnmf {

namespace {

void check_params(const DrNmfParams& p) {
  if (p.W_log.empty()) throw std::invalid_argument("model has no layers");
  if (p.alpha_log.size() != p.num_layers())
    throw std::invalid_argument("alpha_log size does not match layer count");
  const Eigen::Index n = p.W_log[0].cols();
  if (p.h0_log.size() != n)
    throw std::invalid_argument("h0_log size does not match basis count");
  if (p.n_speech + p.n_noise != n)
    throw std::invalid_argument("partition does not match basis count");
  for (const auto& w : p.W_log)
    if (w.rows() != p.W_log[0].rows() || w.cols() != n)
      throw std::invalid_argument("layer dictionary shapes differ");
}

}  // namespace

RealizedWeights realize_weights(const DrNmfParams& p) {
  check_params(p);
  RealizedWeights r;
  r.W.reserve(p.W_log.size());
  for (size_t k = 0; k < p.W_log.size(); ++k) {
    Eigen::MatrixXd W = p.W_log[k].array().exp();
    if (!W.allFinite())
      throw NumericError("realize_weights: overflow in exp(W_log_" +
                         std::to_string(k + 1) + ")");
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      const double n = W.col(j).norm();
      W.col(j) /= n;  // exp output is strictly positive
    }
    if (!W.allFinite())
      throw NumericError("realize_weights: normalization overflow in W_log_" +
                         std::to_string(k + 1));
    r.W.push_back(std::move(W));
  }
  r.alpha = p.alpha_log.array().exp();
  if (!r.alpha.allFinite())
    throw NumericError("realize_weights: overflow in exp(alpha_log)");
  r.h0 = p.h0_log.array().exp();
  if (!r.h0.allFinite())
    throw NumericError("realize_weights: overflow in exp(h0_log)");
  return r;
}

Eigen::MatrixXd compute_mask(const Eigen::MatrixXd& y_hat,
                             const Eigen::MatrixXd& v_hat,
                             double epsilon_mask) {
  if (y_hat.rows() != v_hat.rows() || y_hat.cols() != v_hat.cols())
    throw std::invalid_argument("compute_mask: shape mismatch");
  return (y_hat.array() + 0.5 * epsilon_mask) /
         (y_hat.array() + v_hat.array() + epsilon_mask);
}

double signal_approx_loss(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                          const Eigen::MatrixXd& mask) {
  if (Y.rows() != X.rows() || Y.cols() != X.cols() || mask.rows() != X.rows() ||
      mask.cols() != X.cols())
    throw std::invalid_argument("signal_approx_loss: shape mismatch");
  return (Y.array() - mask.array() * X.array()).square().sum();
}

ForwardTrace forward(const DrNmfParams& p, const Eigen::MatrixXd& X) {
  check_params(p);
  if (X.rows() != p.num_bins())
    throw std::invalid_argument("forward: input bin count mismatch");

  ForwardTrace trace;
  trace.weights = realize_weights(p);
  const int K = p.num_layers();
  const int N = p.num_basis();
  const int T = static_cast<int>(X.cols());

  std::vector<LayerOperator> ops;
  ops.reserve(K);
  for (int k = 0; k < K; ++k)
    ops.push_back(make_layer_operator(trace.weights.W[k], X,
                                      trace.weights.alpha[k], p.lambda1,
                                      /*nonnegative=*/true));

  trace.states.resize(T);
  trace.H.resize(N, T);
  Eigen::VectorXd h = trace.weights.h0;
  for (int t = 0; t < T; ++t) {
    trace.states[t].resize(N, K + 1);
    trace.states[t].col(0) = h;
    for (int k = 0; k < K; ++k) {
      h = layer_step(ops[k], h, t);
      if (!h.allFinite())
        throw NumericError("forward: non-finite state at frame " +
                           std::to_string(t) + ", layer " +
                           std::to_string(k + 1));
      trace.states[t].col(k + 1) = h;
    }
    trace.H.col(t) = h;
  }

  const Eigen::MatrixXd& W_last = trace.weights.W[K - 1];
  trace.y_hat = W_last.leftCols(p.n_speech) * trace.H.topRows(p.n_speech);
  trace.v_hat = W_last.rightCols(p.n_noise) * trace.H.bottomRows(p.n_noise);
  trace.mask = compute_mask(trace.y_hat, trace.v_hat, p.epsilon_mask);
  trace.output = trace.mask.array() * X.array();
  return trace;
}

struct StreamingSeparator::Impl {
  DrNmfParams params;
  RealizedWeights weights;
  std::vector<Eigen::MatrixXd> grams;  // per layer, N x N
  Eigen::VectorXd h;                   // warm-start state
  MaskMode mode;
  Eigen::VectorXd window;
  Eigen::FFT<double> fft;
  // per-frame scratch, reused
  std::vector<double> frame_buf;
  std::vector<std::complex<double>> spectrum;
  Eigen::VectorXd mag, wtx, z;

  size_t bytes() const {
    size_t b = h.size() * sizeof(double);
    for (const auto& g : grams) b += g.size() * sizeof(double);
    for (const auto& w : weights.W) b += w.size() * sizeof(double);
    b += (weights.alpha.size() + weights.h0.size()) * sizeof(double);
    b += window.size() * sizeof(double);
    b += frame_buf.size() * sizeof(double);
    b += spectrum.size() * sizeof(std::complex<double>);
    b += (mag.size() + wtx.size() + z.size()) * sizeof(double);
    return b;
  }
};

StreamingSeparator::StreamingSeparator(const DrNmfParams& p, int frame_size,
                                       int hop, MaskMode mode)
    : impl_(std::make_shared<Impl>()), frame_size_(frame_size), hop_(hop) {
  check_params(p);
  if (p.num_bins() != frame_size / 2 + 1)
    throw std::invalid_argument("model bin count does not match frame_size");
  impl_->params = p;
  impl_->weights = realize_weights(p);
  for (const auto& W : impl_->weights.W)
    impl_->grams.push_back(W.transpose() * W);
  impl_->h = impl_->weights.h0;
  impl_->mode = mode;
  impl_->window = sqrt_hann_window(frame_size);
  impl_->fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->frame_buf.resize(frame_size);
  impl_->spectrum.resize(frame_size / 2 + 1);
}

void StreamingSeparator::process_frame(const Eigen::VectorXd& frame,
                                       double* ola_num, double* ola_den) {
  if (frame.size() != frame_size_)
    throw std::invalid_argument("process_frame: frame size mismatch");
  Impl& s = *impl_;
  const int F = frame_size_ / 2 + 1;
  const DrNmfParams& p = s.params;

  for (int n = 0; n < frame_size_; ++n)
    s.frame_buf[n] = s.window[n] * frame[n];
  s.fft.fwd(s.spectrum, s.frame_buf);

  s.mag.resize(F);
  for (int f = 0; f < F; ++f) s.mag[f] = std::abs(s.spectrum[f]);

  const int K = p.num_layers();
  for (int k = 0; k < K; ++k) {
    const double inv_alpha = 1.0 / s.weights.alpha[k];
    s.wtx.noalias() = s.weights.W[k].transpose() * s.mag;
    s.z.noalias() = s.grams[k] * s.h;
    s.z -= s.wtx;
    s.z = s.h - inv_alpha * s.z;
    s.h = soft_threshold(s.z, p.lambda1 * inv_alpha, true);
    if (!s.h.allFinite())
      throw NumericError("separate: non-finite state at layer " +
                         std::to_string(k + 1));
  }

  const Eigen::MatrixXd& W_last = s.weights.W[K - 1];
  Eigen::VectorXd y_col =
      W_last.leftCols(p.n_speech) * s.h.head(p.n_speech);
  Eigen::VectorXd v_col =
      W_last.rightCols(p.n_noise) * s.h.tail(p.n_noise);
  for (int f = 0; f < F; ++f) {
    double m;
    switch (s.mode) {
      case MaskMode::kIdentity: m = 1.0; break;
      case MaskMode::kZero: m = 0.0; break;
      default:
        m = (y_col[f] + 0.5 * p.epsilon_mask) /
            (y_col[f] + v_col[f] + p.epsilon_mask);
    }
    s.spectrum[f] *= m;
  }
  s.fft.inv(s.frame_buf, s.spectrum, frame_size_);
  for (int n = 0; n < frame_size_; ++n) {
    ola_num[n] += s.window[n] * s.frame_buf[n];
    ola_den[n] += s.window[n] * s.window[n];
  }
}

size_t StreamingSeparator::state_bytes() const { return impl_->bytes(); }

Waveform separate(const DrNmfParams& p, const Waveform& noisy, int frame_size,
                  int hop, MaskMode mode) {
  if (noisy.samples.empty()) throw std::invalid_argument("empty signal");
  if (noisy.num_samples() < frame_size)
    throw std::invalid_argument("signal shorter than one frame");

  StreamingSeparator sep(p, frame_size, hop, mode);
  const int n_frames = (noisy.num_samples() - frame_size) / hop + 1;
  const int out_len = (n_frames - 1) * hop + frame_size;
  std::vector<double> num(out_len, 0.0), den(out_len, 0.0);
  Eigen::VectorXd frame(frame_size);
  for (int t = 0; t < n_frames; ++t) {
    const int start = t * hop;
    for (int n = 0; n < frame_size; ++n)
      frame[n] = noisy.samples[start + n];
    sep.process_frame(frame, num.data() + start, den.data() + start);
  }
  Waveform out;
  out.samples.resize(out_len);
  for (int n = 0; n < out_len; ++n)
    out.samples[n] = den[n] > 1e-12 ? num[n] / den[n] : 0.0;
  return out;
}

}  // namespace drnmf

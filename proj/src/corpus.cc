// src/corpus.cc

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

#include "drnmf/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "drnmf/common.h"
#include "drnmf/wav_io.h"

namespace drnmf {

namespace {

constexpr double kPi = 3.14159265358979323846;

double rms(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return std::sqrt(e / x.size());
}

void scale_to_rms(std::vector<double>& x, double target) {
  const double r = rms(x);
  if (r > 0.0)
    for (double& v : x) v *= target / r;
}

}  // namespace

Waveform synth_vowel_sequence(std::uint64_t seed, double duration_s) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const int n = static_cast<int>(duration_s * kSampleRate);
  std::vector<double> out(n, 0.0);

  const double f0_base = 110.0 + 110.0 * uni(rng);
  const double vibrato_rate = 3.0 + 4.0 * uni(rng);
  const double vibrato_depth = 0.01 + 0.03 * uni(rng);
  const double drift = -0.15 + 0.3 * uni(rng);  // octaves over the utterance

  const int n_segments = 3 + static_cast<int>(uni(rng) * 3.0);
  const int gap = static_cast<int>(0.03 * kSampleRate);
  const int seg_len = std::max(1, (n - (n_segments - 1) * gap) / n_segments);
  const int attack = static_cast<int>(0.02 * kSampleRate);
  const int release = static_cast<int>(0.03 * kSampleRate);

  const int max_harmonics = static_cast<int>(6000.0 / f0_base);
  std::vector<double> phase(max_harmonics + 1, 0.0);

  int pos = 0;
  for (int seg = 0; seg < n_segments && pos < n; ++seg) {
    // Two formant bumps shape this segment's harmonic amplitudes.
    const double f1 = 300.0 + 600.0 * uni(rng);
    const double f2 = 1000.0 + 1400.0 * uni(rng);
    const double b1 = 80.0 + 120.0 * uni(rng);
    const double b2 = 120.0 + 180.0 * uni(rng);
    const double seg_gain = 0.6 + 0.4 * uni(rng);

    std::vector<double> amp(max_harmonics + 1, 0.0);
    for (int m = 1; m <= max_harmonics; ++m) {
      const double f = m * f0_base;
      amp[m] = std::exp(-0.5 * std::pow((f - f1) / b1, 2)) +
               0.7 * std::exp(-0.5 * std::pow((f - f2) / b2, 2)) + 0.04 / m;
    }

    const int seg_end = std::min(n, pos + seg_len);
    for (int i = pos; i < seg_end; ++i) {
      const double t = static_cast<double>(i) / kSampleRate;
      const double f0 =
          f0_base *
          std::pow(2.0, drift * (static_cast<double>(i) / n) +
                            vibrato_depth *
                                std::sin(2.0 * kPi * vibrato_rate * t));
      double env = seg_gain;
      if (i - pos < attack) env *= static_cast<double>(i - pos) / attack;
      if (seg_end - i < release)
        env *= static_cast<double>(seg_end - i) / release;
      double s = 0.0;
      for (int m = 1; m <= max_harmonics; ++m) {
        phase[m] += 2.0 * kPi * m * f0 / kSampleRate;
        if (m * f0 < 6000.0) s += amp[m] * std::sin(phase[m]);
      }
      out[i] = env * s;
    }
    pos = seg_end + gap;
  }

  scale_to_rms(out, 0.08);
  return Waveform{std::move(out), kSampleRate};
}

Waveform synth_interference(std::uint64_t seed, double duration_s) {
  if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
  std::mt19937_64 rng(seed ^ 0xa5a5a5a5deadbeefULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n = static_cast<int>(duration_s * kSampleRate);
  std::vector<double> out(n, 0.0);

  // Colored noise: white noise through two first-order sections.
  const double a1 = 0.3 + 0.65 * uni(rng);
  const double a2 = 0.1 + 0.5 * uni(rng);
  const bool highpassish = uni(rng) < 0.5;
  double s1 = 0.0, s2 = 0.0;
  std::vector<double> colored(n);
  for (int i = 0; i < n; ++i) {
    const double w = gauss(rng);
    s1 = a1 * s1 + (1.0 - a1) * w;
    s2 = a2 * s2 + (1.0 - a2) * s1;
    colored[i] = highpassish ? w - s2 : s2;
  }
  scale_to_rms(colored, 1.0);

  // Amplitude-modulated tones.
  const int n_tones = 1 + static_cast<int>(uni(rng) * 2.0);
  std::vector<double> tones(n, 0.0);
  for (int k = 0; k < n_tones; ++k) {
    const double freq = 2500.0 + 4000.0 * uni(rng);
    const double am_rate = 1.5 + 6.5 * uni(rng);
    const double depth = 0.5 + 0.5 * uni(rng);
    const double phase0 = 2.0 * kPi * uni(rng);
    const double gain = 0.5 + 0.5 * uni(rng);
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / kSampleRate;
      const double am =
          1.0 - depth * 0.5 * (1.0 + std::cos(2.0 * kPi * am_rate * t));
      tones[i] += gain * am * std::sin(2.0 * kPi * freq * t + phase0);
    }
  }
  scale_to_rms(tones, 1.0);

  const double tone_share = 0.3 + 0.4 * uni(rng);
  for (int i = 0; i < n; ++i)
    out[i] = (1.0 - tone_share) * colored[i] + tone_share * tones[i];
  scale_to_rms(out, 0.08);
  return Waveform{std::move(out), kSampleRate};
}

UtteranceTriplet synth_triplet(const MixSpec& spec) {
  UtteranceTriplet t;
  t.clean = synth_vowel_sequence(spec.seed, spec.duration_s);
  Waveform interference = synth_interference(spec.seed, spec.duration_s);
  MixResult mix = mix_at_snr(t.clean, interference, spec.snr_db);
  t.noise = std::move(mix.scaled_noise);
  t.mixture = std::move(mix.mixture);

  double peak = 0.0;
  for (double v : t.mixture.samples) peak = std::max(peak, std::abs(v));
  for (double v : t.clean.samples) peak = std::max(peak, std::abs(v));
  for (double v : t.noise.samples) peak = std::max(peak, std::abs(v));
  const double limit = 0.95;
  if (peak > limit) {
    const double s = limit / peak;
    for (double& v : t.clean.samples) v *= s;
    for (double& v : t.noise.samples) v *= s;
    for (double& v : t.mixture.samples) v *= s;
  }
  return t;
}

std::vector<CorpusEntry> synth_corpus(int n_utts, std::uint64_t seed,
                                      double duration_s,
                                      const std::string& out_dir) {
  if (n_utts < 1) throw std::invalid_argument("n_utts must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir + ": cannot create directory");

  std::vector<CorpusEntry> entries;
  entries.reserve(n_utts);
  for (int i = 0; i < n_utts; ++i) {
    MixSpec spec;
    spec.snr_db = kSnrLevelsDb[i % kNumSnrLevels];
    spec.seed = seed + 1000003ULL * (i + 1);
    spec.duration_s = duration_s;
    const UtteranceTriplet triplet = synth_triplet(spec);

    char utt_id[32];
    std::snprintf(utt_id, sizeof(utt_id), "utt_%04d", i);
    CorpusEntry e;
    e.utt_id = utt_id;
    e.snr_db = spec.snr_db;
    e.clean_path = std::string(utt_id) + "_clean.wav";
    e.noise_path = std::string(utt_id) + "_noise.wav";
    e.mix_path = std::string(utt_id) + "_mix.wav";
    write_wav(out_dir + "/" + e.clean_path, triplet.clean);
    write_wav(out_dir + "/" + e.noise_path, triplet.noise);
    write_wav(out_dir + "/" + e.mix_path, triplet.mixture);
    entries.push_back(std::move(e));
  }
  // The manifest stays relative; callers get resolved paths.
  write_manifest(out_dir + "/manifest.csv", entries);
  for (auto& e : entries) {
    e.clean_path = out_dir + "/" + e.clean_path;
    e.noise_path = out_dir + "/" + e.noise_path;
    e.mix_path = out_dir + "/" + e.mix_path;
  }
  return entries;
}

void write_manifest(const std::string& path,
                    const std::vector<CorpusEntry>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "utt_id,snr_db,clean_path,noise_path,mix_path\n";
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%g", e.snr_db);
    out << e.utt_id << ',' << buf << ',' << e.clean_path << ','
        << e.noise_path << ',' << e.mix_path << '\n';
  }
  if (!out) throw IoError(path + ": write failed");
}

std::vector<CorpusEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  const std::string dir =
      std::filesystem::path(path).parent_path().string();
  auto resolve = [&](const std::string& p) {
    if (p.empty() || std::filesystem::path(p).is_absolute() || dir.empty())
      return p;
    return dir + "/" + p;
  };

  std::vector<CorpusEntry> entries;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    CorpusEntry e;
    std::string snr;
    if (!std::getline(ss, e.utt_id, ',') || !std::getline(ss, snr, ',') ||
        !std::getline(ss, e.clean_path, ',') ||
        !std::getline(ss, e.noise_path, ',') ||
        !std::getline(ss, e.mix_path, ','))
      throw IoError(path + ": malformed manifest row '" + line + "'");
    e.snr_db = std::stod(snr);
    e.clean_path = resolve(e.clean_path);
    e.noise_path = resolve(e.noise_path);
    e.mix_path = resolve(e.mix_path);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw IoError(path + ": empty manifest");
  return entries;
}

std::vector<SupervisedExample> load_supervised_examples(
    const std::vector<CorpusEntry>& entries, int frame_size, int hop,
    int max_frames) {
  std::vector<SupervisedExample> out;
  for (const auto& e : entries) {
    const Spectrogram mix = stft(read_wav(e.mix_path), frame_size, hop);
    const Spectrogram clean = stft(read_wav(e.clean_path), frame_size, hop);
    if (mix.num_frames() != clean.num_frames())
      throw IoError(e.utt_id + ": clean/mix frame counts differ");
    auto chunks = split_sequence(mix.magnitude, clean.magnitude, max_frames);
    out.insert(out.end(), std::make_move_iterator(chunks.begin()),
               std::make_move_iterator(chunks.end()));
  }
  return out;
}

}  // namespace drnmf

// include/drnmf/corpus.h

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

#ifndef DRNMF_CORPUS_H_
#define DRNMF_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "drnmf/signal.h"
#include "drnmf/train.h"

namespace drnmf {

// SNR levels utterances cycle through, balanced across the corpus.
inline constexpr double kSnrLevelsDb[] = {-6.0, -3.0, 0.0, 3.0, 6.0, 9.0};
inline constexpr int kNumSnrLevels = 6;

// Recipe for one synthetic utterance.
struct MixSpec {
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  double duration_s = 1.0;
};

struct UtteranceTriplet {
  Waveform clean;
  Waveform noise;  // already scaled to the requested SNR
  Waveform mixture;
};

// Deterministic clean/noise/mixture triplet; a common scale keeps the SNR
// while leaving PCM headroom.
UtteranceTriplet synth_triplet(const MixSpec& spec);

struct CorpusEntry {
  std::string utt_id;
  double snr_db = 0.0;
  std::string clean_path;
  std::string noise_path;
  std::string mix_path;
};

// Harmonic-stack "vowel" sequence: randomized pitch contour, per-segment
// formant-shaped harmonic amplitudes, attack/release envelopes.
Waveform synth_vowel_sequence(std::uint64_t seed, double duration_s);

// Filtered noise plus amplitude-modulated tones.
Waveform synth_interference(std::uint64_t seed, double duration_s);

// Writes n_utts (clean, noise, mixture) WAV triplets plus manifest.csv into
// out_dir. Deterministic given the seed; utterance i gets SNR level i mod 6.
std::vector<CorpusEntry> synth_corpus(int n_utts, std::uint64_t seed,
                                      double duration_s,
                                      const std::string& out_dir);

void write_manifest(const std::string& path,
                    const std::vector<CorpusEntry>& entries);

// Relative paths in the manifest resolve against the manifest's directory.
std::vector<CorpusEntry> read_manifest(const std::string& path);

// Loads (mixture, clean) magnitude pairs, split to at most max_frames.
std::vector<SupervisedExample> load_supervised_examples(
    const std::vector<CorpusEntry>& entries, int frame_size, int hop,
    int max_frames);

}  // namespace drnmf

#endif  // DRNMF_CORPUS_H_

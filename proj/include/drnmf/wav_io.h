// include/drnmf/wav_io.h

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

#ifndef DRNMF_WAV_IO_H_
#define DRNMF_WAV_IO_H_

#include <string>

#include "drnmf/signal.h"

namespace drnmf {

// PCM 16-bit little-endian, mono, 16 kHz. Anything else is rejected.
Waveform read_wav(const std::string& path);

// Samples are rounded to the nearest 16-bit code; values outside [-1, 1)
// saturate. Returns the number of clipped samples.
int write_wav(const std::string& path, const Waveform& w);

}  // namespace drnmf

#endif  // DRNMF_WAV_IO_H_

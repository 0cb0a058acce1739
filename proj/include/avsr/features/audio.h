// avsr/features/audio.h

// Copyright 2026  The AVSR Toolkit Authors

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

#ifndef AVSR_FEATURES_AUDIO_H_
#define AVSR_FEATURES_AUDIO_H_

#include <string>
#include <vector>

#include "avsr/numerics/tensor.h"

namespace avsr {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 16000;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

enum class WindowKind { kHann, kRectangular };

struct StftConfig {
  double window_ms = 40.0;
  double hop_ms = 10.0;
  WindowKind window = WindowKind::kHann;
  // Multiplies every magnitude; 1 gives the plain DFT modulus.
  double scale = 1.0;

  int WindowSamples(int sample_rate) const;  // throws ConfigError if fractional
  int HopSamples(int sample_rate) const;
};

std::vector<double> AnalysisWindow(WindowKind kind, int length);

// Scale that maps a unit-amplitude sinusoid at a bin centre to magnitude 1.
double UnitToneScale(const StftConfig &config, int sample_rate);

// Magnitudes of the DFT of each windowed frame, bins 0..N/2:
// [floor((len - N) / hop) + 1 x N/2 + 1]. Throws DataError when the
// waveform is shorter than one window.
Tensor StftMagnitudes(const Waveform &wave, const StftConfig &config = {});

// Consecutive groups of `group` frames concatenated feature-wise; the last
// group is zero-padded. [ceil(F / group) x group * bins].
Tensor GroupAudioFrames(const Tensor &spectrogram, int group = 4);
// Inverse of GroupAudioFrames for the first `frames` frames.
Tensor UngroupAudioFrames(const Tensor &grouped, int frames, int group = 4);

// Mono 16-bit PCM WAV files. Reading checks format, channel count, sample
// width and the expected sample rate.
Waveform ReadWav(const std::string &path, int expected_rate = 16000);
void WriteWav(const std::string &path, const Waveform &wave);

}  // namespace avsr

#endif  // AVSR_FEATURES_AUDIO_H_

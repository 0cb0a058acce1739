// features/audio.cc

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

#include "avsr/features/audio.h"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "avsr/base/binary_io.h"
#include "avsr/base/error.h"

namespace avsr {

namespace {

int MsToSamples(double ms, int sample_rate, const char *what) {
  double n = ms * sample_rate / 1000.0;
  long rounded = std::lround(n);
  if (std::fabs(n - rounded) > 1e-9 || rounded < 1)
    throw ConfigError(std::string("stft: ") + what + " of " + std::to_string(ms) + " ms is not a " +
                      "whole number of samples at " + std::to_string(sample_rate) + " Hz");
  return static_cast<int>(rounded);
}

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex planner_mutex;

}  // namespace

int StftConfig::WindowSamples(int sample_rate) const {
  return MsToSamples(window_ms, sample_rate, "window");
}

int StftConfig::HopSamples(int sample_rate) const {
  return MsToSamples(hop_ms, sample_rate, "hop");
}

std::vector<double> AnalysisWindow(WindowKind kind, int length) {
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::kHann)
    for (int n = 0; n < length; ++n) w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / length);
  return w;
}

double UnitToneScale(const StftConfig &config, int sample_rate) {
  double sum = 0.0;
  for (double v : AnalysisWindow(config.window, config.WindowSamples(sample_rate))) sum += v;
  return 2.0 / sum;
}

Tensor StftMagnitudes(const Waveform &wave, const StftConfig &config) {
  if (wave.sample_rate <= 0) throw ConfigError("stft: sample rate must be positive");
  const int N = config.WindowSamples(wave.sample_rate);
  const int hop = config.HopSamples(wave.sample_rate);
  const long len = static_cast<long>(wave.samples.size());
  if (len < N)
    throw DataError("stft: " + std::to_string(len) + " samples is shorter than one " +
                    std::to_string(N) + "-sample window");
  const int frames = static_cast<int>((len - N) / hop + 1);
  const int bins = N / 2 + 1;
  const std::vector<double> window = AnalysisWindow(config.window, N);

  double *in = fftw_alloc_real(N);
  fftw_complex *out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft_r2c_1d(N, in, out, FFTW_ESTIMATE);
  }
  Tensor spec({frames, bins});
  for (int f = 0; f < frames; ++f) {
    const double *x = wave.samples.data() + static_cast<size_t>(f) * hop;
    for (int n = 0; n < N; ++n) in[n] = x[n] * window[n];
    fftw_execute_dft_r2c(plan, in, out);
    for (int k = 0; k < bins; ++k) spec.at(f, k) = config.scale * std::hypot(out[k][0], out[k][1]);
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

Tensor GroupAudioFrames(const Tensor &spectrogram, int group) {
  if (spectrogram.rank() != 2 || spectrogram.dim(0) < 1)
    throw DimensionError("group frames: expected a non-empty [F x bins] matrix");
  if (group < 1) throw ConfigError("group frames: group size must be >= 1");
  const int F = spectrogram.dim(0), B = spectrogram.dim(1);
  const int rows = (F + group - 1) / group;
  Tensor out({rows, group * B});
  for (int f = 0; f < F; ++f)
    std::copy_n(spectrogram.data().data() + static_cast<size_t>(f) * B, B,
                out.data().data() + static_cast<size_t>(f / group) * group * B + (f % group) * B);
  return out;
}

Tensor UngroupAudioFrames(const Tensor &grouped, int frames, int group) {
  if (grouped.rank() != 2 || grouped.dim(1) % group != 0)
    throw DimensionError("ungroup frames: width " + std::to_string(grouped.cols()) +
                         " not divisible by " + std::to_string(group));
  const int B = grouped.dim(1) / group;
  if (frames < 1 || frames > grouped.dim(0) * group)
    throw DimensionError("ungroup frames: " + std::to_string(frames) + " frames requested from " +
                         std::to_string(grouped.dim(0)) + " groups");
  Tensor out({frames, B});
  for (int f = 0; f < frames; ++f)
    std::copy_n(grouped.data().data() + static_cast<size_t>(f / group) * group * B + (f % group) * B,
                B, out.data().data() + static_cast<size_t>(f) * B);
  return out;
}

Waveform ReadWav(const std::string &path, int expected_rate) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot read " + path);
  char tag[4];
  auto read_tag = [&](const char *want) {
    is.read(tag, 4);
    if (is.gcount() != 4 || std::memcmp(tag, want, 4) != 0)
      throw DataError(path + ": not a RIFF/WAVE file (missing " + want + ")");
  };
  read_tag("RIFF");
  binary::ReadLe<uint32_t>(is, "riff size");
  read_tag("WAVE");
  bool have_format = false;
  Waveform wave;
  while (true) {
    is.read(tag, 4);
    if (is.gcount() != 4) throw DataError(path + ": no data chunk");
    uint32_t size = binary::ReadLe<uint32_t>(is, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      uint16_t format = binary::ReadLe<uint16_t>(is, "format");
      uint16_t channels = binary::ReadLe<uint16_t>(is, "channels");
      uint32_t rate = binary::ReadLe<uint32_t>(is, "sample rate");
      binary::ReadLe<uint32_t>(is, "byte rate");
      binary::ReadLe<uint16_t>(is, "block align");
      uint16_t bits = binary::ReadLe<uint16_t>(is, "bits per sample");
      if (format != 1 || channels != 1 || bits != 16)
        throw DataError(path + ": expected mono 16-bit PCM, got format " + std::to_string(format) +
                        ", " + std::to_string(channels) + " channels, " + std::to_string(bits) +
                        " bits");
      if (static_cast<int>(rate) != expected_rate)
        throw DataError(path + ": sample rate " + std::to_string(rate) + " Hz, expected " +
                        std::to_string(expected_rate));
      wave.sample_rate = static_cast<int>(rate);
      is.ignore(size - 16);
      have_format = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_format) throw DataError(path + ": data chunk before fmt chunk");
      wave.samples.resize(size / 2);
      for (double &s : wave.samples) s = binary::ReadLe<int16_t>(is, "samples") / 32768.0;
      return wave;
    } else {
      is.ignore(size + (size & 1));
    }
  }
}

void WriteWav(const std::string &path, const Waveform &wave) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  os.write("RIFF", 4);
  binary::WriteLe<uint32_t>(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  binary::WriteLe<uint32_t>(os, 16);
  binary::WriteLe<uint16_t>(os, 1);
  binary::WriteLe<uint16_t>(os, 1);
  binary::WriteLe<uint32_t>(os, static_cast<uint32_t>(wave.sample_rate));
  binary::WriteLe<uint32_t>(os, static_cast<uint32_t>(wave.sample_rate) * 2);
  binary::WriteLe<uint16_t>(os, 2);
  binary::WriteLe<uint16_t>(os, 16);
  os.write("data", 4);
  binary::WriteLe<uint32_t>(os, data_bytes);
  for (double s : wave.samples) {
    double c = std::clamp(s, -1.0, 32767.0 / 32768.0);
    binary::WriteLe<int16_t>(os, static_cast<int16_t>(std::lround(c * 32768.0)));
  }
  if (!os) throw DataError("write failed: " + path);
}

}  // namespace avsr

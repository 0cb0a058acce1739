// corpus/augment.cc

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


#include "avsr/corpus/augment.h"

#include <algorithm>

#include "avsr/base/error.h"

namespace avsr {

namespace {

void RequireClip(const Tensor &clip, const char *what) {
  if (clip.rank() != 4) throw DimensionError(std::string(what) + ": need a [T x H x W x C] clip, got " +
                                             ShapeString(clip.shape()));
}

size_t FrameSize(const Tensor &clip) { return clip.size() / clip.dim(0); }

}  // namespace

void AugmentConfig::Validate() const {
  for (double p : {flip_prob, frame_drop_prob, shift_prob})
    if (p < 0.0 || p > 1.0) throw ConfigError("augment: probabilities must lie in [0, 1]");
  if (max_spatial_shift < 0 || max_temporal_shift < 0) throw ConfigError("augment: negative shift range");
}

Tensor HorizontalFlip(const Tensor &clip) {
  RequireClip(clip, "flip");
  const int t = clip.dim(0), h = clip.dim(1), w = clip.dim(2), c = clip.dim(3);
  Tensor out(clip.shape());
  for (int f = 0; f < t; ++f)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int k = 0; k < c; ++k)
          out[((static_cast<size_t>(f) * h + y) * w + x) * c + k] =
              clip[((static_cast<size_t>(f) * h + y) * w + (w - 1 - x)) * c + k];
  return out;
}

Tensor SpatialShift(const Tensor &clip, int dy, int dx) {
  RequireClip(clip, "spatial shift");
  const int t = clip.dim(0), h = clip.dim(1), w = clip.dim(2), c = clip.dim(3);
  Tensor out(clip.shape());
  for (int f = 0; f < t; ++f)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int sy = std::clamp(y - dy, 0, h - 1), sx = std::clamp(x - dx, 0, w - 1);
        for (int k = 0; k < c; ++k)
          out[((static_cast<size_t>(f) * h + y) * w + x) * c + k] =
              clip[((static_cast<size_t>(f) * h + sy) * w + sx) * c + k];
      }
  return out;
}

Tensor TemporalShift(const Tensor &clip, int shift) {
  if (clip.rank() < 2) throw DimensionError("temporal shift: need a sequence");
  const int t = clip.dim(0);
  const size_t frame = FrameSize(clip);
  Tensor out(clip.shape());
  for (int f = 0; f < t; ++f) {
    int src = std::clamp(f - shift, 0, t - 1);
    std::copy_n(clip.data().begin() + src * frame, frame, out.data().begin() + f * frame);
  }
  return out;
}

Tensor DropFrames(const Tensor &clip, const std::vector<bool> &keep) {
  if (clip.rank() < 2) throw DimensionError("frame removal: need a sequence");
  if (static_cast<int>(keep.size()) != clip.dim(0)) throw DimensionError("frame removal: mask length");
  const int kept = static_cast<int>(std::count(keep.begin(), keep.end(), true));
  if (kept == 0) throw DataError("frame removal: no frame left");
  Shape shape = clip.shape();
  shape[0] = kept;
  Tensor out(shape);
  const size_t frame = FrameSize(clip);
  int dst = 0;
  for (int f = 0; f < clip.dim(0); ++f)
    if (keep[f]) std::copy_n(clip.data().begin() + f * frame, frame, out.data().begin() + dst++ * frame);
  return out;
}

Tensor AugmentClip(const Tensor &clip, const AugmentConfig &config, Rng &rng) {
  config.Validate();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor out = clip;
  if (config.flip_prob > 0.0 && u(rng) < config.flip_prob) out = HorizontalFlip(out);
  if (config.max_spatial_shift > 0 && u(rng) < config.shift_prob) {
    std::uniform_int_distribution<int> d(-config.max_spatial_shift, config.max_spatial_shift);
    int dy = d(rng), dx = d(rng);
    out = SpatialShift(out, dy, dx);
  }
  if (config.max_temporal_shift > 0 && u(rng) < config.shift_prob) {
    std::uniform_int_distribution<int> d(-config.max_temporal_shift, config.max_temporal_shift);
    out = TemporalShift(out, d(rng));
  }
  if (config.frame_drop_prob > 0.0) {
    std::vector<bool> keep(out.dim(0));
    for (size_t f = 0; f < keep.size(); ++f) keep[f] = u(rng) >= config.frame_drop_prob;
    if (std::none_of(keep.begin(), keep.end(), [](bool k) { return k; }))
      keep[std::uniform_int_distribution<size_t>(0, keep.size() - 1)(rng)] = true;
    out = DropFrames(out, keep);
  }
  return out;
}

}  // namespace avsr

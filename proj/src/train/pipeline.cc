// train/pipeline.cc

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


#include "avsr/train/pipeline.h"

#include <algorithm>

#include "avsr/base/error.h"

namespace avsr {

FeaturePipeline FeaturePipeline::Default(int sample_rate) {
  FeaturePipeline p;
  p.sample_rate = sample_rate;
  p.stft.scale = UnitToneScale(p.stft, sample_rate);
  return p;
}

FeaturePipeline FeaturePipeline::ForCorpus(const CorpusSpec &spec,
                                           std::optional<FrontendConfig> frontend) {
  FeaturePipeline p = Default(spec.sample_rate);
  p.frontend = std::move(frontend);
  return p;
}

int FeaturePipeline::audio_dim() const {
  return audio_group * (stft.WindowSamples(sample_rate) / 2 + 1);
}

int FeaturePipeline::video_dim(const CorpusSpec &spec) const {
  if (spec.visual == VisualMode::kFeatures) return spec.visual_dim;
  if (!frontend) throw ConfigError("pipeline: image corpus needs a visual front-end");
  return frontend->output_dim();
}

Tensor FeaturePipeline::Audio(const Waveform &wave) const {
  if (wave.sample_rate != sample_rate)
    throw DataError("pipeline: audio at " + std::to_string(wave.sample_rate) + " Hz, expected " +
                    std::to_string(sample_rate));
  return GroupAudioFrames(StftMagnitudes(wave, stft), audio_group);
}

Tensor FeaturePipeline::Video(const Tensor &clip, const ParameterSet &params) const {
  if (clip.rank() == 2) return clip;
  if (!frontend) throw ConfigError("pipeline: image clip but no visual front-end configured");
  return ExtractVisualFeatures(params, *frontend, clip, "fe");
}

AvInput FeaturePipeline::Input(const Utterance &u, Modalities modalities, const ParameterSet &params,
                               int pad_frames) const {
  AvInput in;
  if (modalities.video) in.video = Video(u.video, params);
  if (modalities.audio) in.audio = Audio(u.audio);
  if (pad_frames > 0) {
    if (modalities.video) {
      in.video_valid = in.video.dim(0);
      in.video = PadRows(in.video, pad_frames);
    }
    if (modalities.audio) {
      in.audio_valid = in.audio.dim(0);
      in.audio = PadRows(in.audio, pad_frames);
    }
  }
  return in;
}

Tensor PadRows(const Tensor &t, int rows) {
  if (t.rank() < 1 || rows < t.dim(0))
    throw DimensionError("pad: " + std::to_string(rows) + " rows requested for " + ShapeString(t.shape()));
  if (rows == t.dim(0)) return t;
  Shape shape = t.shape();
  shape[0] = rows;
  Tensor out(shape);
  std::copy(t.data().begin(), t.data().end(), out.data().begin());
  return out;
}

void CopyFrontendParameters(const ParameterSet &from, ParameterSet *to) {
  for (const auto &[name, t] : from)
    if (name.rfind("fe/", 0) == 0) (*to)[name] = t;
}

}  // namespace avsr

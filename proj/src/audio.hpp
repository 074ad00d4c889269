// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_AUDIO_HPP_
#define TAPBEAM_AUDIO_HPP_

#include <Eigen/Dense>

#include "common.hpp"

namespace tapbeam {

// M x N time-domain sample block, channel-major. The waveform currency of
// the whole pipeline; always double precision internally.
struct MultiChannelAudio {
  Eigen::MatrixXd samples;  // rows = channels, cols = samples
  int sample_rate = 16000;

  int channels() const { return static_cast<int>(samples.rows()); }
  int64_t num_samples() const { return samples.cols(); }

  void validate() const {
    require(samples.rows() >= 1 && samples.cols() >= 1, ErrorKind::Data,
            "audio must have at least one channel and one sample");
    require(samples.allFinite(), ErrorKind::Data,
            "audio contains NaN or Inf samples");
    require(sample_rate > 0, ErrorKind::Config, "sample rate must be positive");
  }
};

}  // namespace tapbeam

#endif  // TAPBEAM_AUDIO_HPP_

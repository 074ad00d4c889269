// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_STFT_HPP_
#define TAPBEAM_STFT_HPP_

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "audio.hpp"

namespace tapbeam {

struct StftConfig {
  int window_len = 512;
  int hop = 256;
  int fft_len = 512;  // kept equal to window_len
  int sample_rate = 16000;

  int num_bins() const { return fft_len / 2 + 1; }

  void validate() const {
    require(window_len > 0 && hop > 0 && fft_len >= window_len,
            ErrorKind::Config, "invalid STFT configuration");
    require(hop <= window_len, ErrorKind::Config,
            "hop must not exceed window length");
  }

  bool operator==(const StftConfig &o) const {
    return window_len == o.window_len && hop == o.hop && fft_len == o.fft_len &&
           sample_rate == o.sample_rate;
  }
};

// Complex M x F x T tensor stored as one F x T matrix per channel.
// Frame t is centered at sample t*hop of the original signal (the analysis
// reflect-pads half a window on each side).
struct Spectrogram {
  std::vector<Eigen::MatrixXcd> channels;  // each F x T
  StftConfig config;
  int64_t num_samples = 0;  // original length, for synthesis

  int num_channels() const { return static_cast<int>(channels.size()); }
  int num_bins() const {
    return channels.empty() ? 0 : static_cast<int>(channels[0].rows());
  }
  int num_frames() const {
    return channels.empty() ? 0 : static_cast<int>(channels[0].cols());
  }
};

// Periodic Hann window of length n.
Eigen::VectorXd hann_periodic(int n);

// Forward STFT. T = ceil(N / hop) frames; one-sided spectrum with
// F = fft_len/2 + 1 bins.
Spectrogram stft_analyze(const MultiChannelAudio &audio, const StftConfig &cfg);

// Weighted overlap-add inverse with squared-window normalization.
// Reconstructs the interior of the original signal to high precision.
MultiChannelAudio stft_synthesize(const Spectrogram &spec);

// One-sided real FFT of x zero-padded to length n (n/2 + 1 bins).
Eigen::VectorXcd rfft(const Eigen::VectorXd &x, int n);

// Inverse of rfft, scaled so irfft(rfft(x, n), n) == x.
Eigen::VectorXd irfft(const Eigen::VectorXcd &spectrum, int n);

}  // namespace tapbeam

#endif  // TAPBEAM_STFT_HPP_

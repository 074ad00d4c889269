// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_TAPSTACK_HPP_
#define TAPBEAM_TAPSTACK_HPP_

#include <string>
#include <vector>

#include "mask.hpp"
#include "stft.hpp"

namespace tapbeam {

// One frame offset of the spatio-temporal expansion, optionally restricted
// to a subset of channels (e.g. "-3[0:6]" uses channels 0..5 at offset -3).
struct Tap {
  int offset = 0;
  std::vector<int> channels;  // empty = all channels

  int width(int num_channels) const {
    return channels.empty() ? num_channels : static_cast<int>(channels.size());
  }
};

struct TapSet {
  std::vector<Tap> taps;  // sorted ascending by offset; contains offset 0

  int stacked_dim(int num_channels) const {
    int d = 0;
    for (const auto &t : taps) d += t.width(num_channels);
    return d;
  }

  // Row index of (reference channel, offset 0) within the stacked vector.
  int reference_index(int num_channels, int ref_channel) const;

  void validate(int num_channels) const;
  std::string to_string() const;
};

// Parse "-1,0,1" or "-3[0:6],0" (half-open channel slices). Offsets are
// sorted ascending; duplicates and a missing 0 offset are errors.
TapSet parse_taps(const std::string &text);

// Multi-tap expansion, stored per frequency as (ML') x T matrices so the
// covariance accumulations are single matrix products. Out-of-range frames
// contribute zero blocks.
struct StackedSpectrogram {
  std::vector<Eigen::MatrixXcd> freq;  // F entries, each (ML') x T
  TapSet taps;
  int num_channels = 0;
  StftConfig config;
  int64_t num_samples = 0;

  int num_bins() const { return static_cast<int>(freq.size()); }
  int num_frames() const {
    return freq.empty() ? 0 : static_cast<int>(freq[0].cols());
  }
  int dim() const { return freq.empty() ? 0 : static_cast<int>(freq[0].rows()); }
};

StackedSpectrogram stack(const Spectrogram &spec, const TapSet &taps);

enum class CovarianceKind {
  MaskedSpeech,
  MaskedNoise,
  SigmaWeighted,
  SigmaNormalized,
};

struct FreqCovariance {
  std::vector<Eigen::MatrixXcd> matrices;  // F entries, (ML') x (ML') Hermitian
  CovarianceKind kind = CovarianceKind::MaskedSpeech;
  std::vector<int> flagged;  // frequencies whose denominators were floored

  int num_bins() const { return static_cast<int>(matrices.size()); }
};

// Masked spatio-temporal covariance: the mask is shifted per tap offset
// exactly like the spectrogram, the numerator sums the masked stacked outer
// products, and the denominator is the offset-0 mask energy per frequency.
FreqCovariance masked_covariance(const StackedSpectrogram &stacked,
                                 const ComplexMask &mask);

// Unnormalized sigma-weighted scatter: R(f) = sum_t Ybar Ybar^H / sigma^2(t,f).
FreqCovariance sigma_weighted_covariance(const StackedSpectrogram &stacked,
                                         const SigmaPower &sigma2);

// Utterance-normalized variant:
// Rtilde(f) = sum_t (1/sigma^2) Ybar Ybar^H / sum_t (1/sigma^2).
FreqCovariance sigma_normalized_covariance(const StackedSpectrogram &stacked,
                                           const SigmaPower &sigma2);

}  // namespace tapbeam

#endif  // TAPBEAM_TAPSTACK_HPP_

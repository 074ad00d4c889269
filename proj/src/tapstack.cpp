// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tapstack.hpp"

#include <algorithm>
#include <sstream>

namespace tapbeam {

namespace {

// Mask-energy denominators are dimensionless; this floor only guards
// all-zero masks at a frequency.
constexpr double kDenomFloor = 1e-12;

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd &a) {
  return 0.5 * (a + a.adjoint());
}

}  // namespace

void TapSet::validate(int num_channels) const {
  require(!taps.empty(), ErrorKind::Config, "tap set is empty");
  bool has_zero = false;
  for (size_t i = 0; i < taps.size(); ++i) {
    if (i > 0)
      require(taps[i - 1].offset < taps[i].offset, ErrorKind::Config,
              "tap offsets must be distinct and ascending");
    if (taps[i].offset == 0) has_zero = true;
    const auto &subset = taps[i].channels;
    if (!subset.empty()) {
      for (int c : subset)
        require(c >= 0 && c < num_channels, ErrorKind::Config,
                "tap channel subset index out of range");
    }
  }
  require(has_zero, ErrorKind::Config, "tap set must contain offset 0");
}

int TapSet::reference_index(int num_channels, int ref_channel) const {
  int base = 0;
  for (const auto &tap : taps) {
    if (tap.offset == 0) {
      if (tap.channels.empty()) {
        require(ref_channel >= 0 && ref_channel < num_channels,
                ErrorKind::Config, "reference channel out of range");
        return base + ref_channel;
      }
      auto it = std::find(tap.channels.begin(), tap.channels.end(), ref_channel);
      require(it != tap.channels.end(), ErrorKind::Config,
              "reference channel not present in the offset-0 tap subset");
      return base + static_cast<int>(it - tap.channels.begin());
    }
    base += tap.width(num_channels);
  }
  throw Error(ErrorKind::Config, "tap set must contain offset 0");
}

std::string TapSet::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < taps.size(); ++i) {
    if (i) os << ",";
    os << taps[i].offset;
    if (!taps[i].channels.empty()) {
      // contiguous ranges print back as slices
      os << "[" << taps[i].channels.front() << ":"
         << taps[i].channels.back() + 1 << "]";
    }
  }
  return os.str();
}

TapSet parse_taps(const std::string &text) {
  TapSet set;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) {
    // strip blanks
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                token.end());
    require(!token.empty(), ErrorKind::Config, "empty tap token in '" + text + "'");
    Tap tap;
    size_t bracket = token.find('[');
    std::string offset_part = token.substr(0, bracket);
    try {
      size_t used = 0;
      tap.offset = std::stoi(offset_part, &used);
      require(used == offset_part.size(), ErrorKind::Config,
              "bad tap offset '" + offset_part + "'");
    } catch (const std::exception &) {
      throw Error(ErrorKind::Config, "bad tap offset '" + offset_part + "'");
    }
    if (bracket != std::string::npos) {
      require(token.back() == ']', ErrorKind::Config,
              "unterminated channel slice in '" + token + "'");
      std::string slice = token.substr(bracket + 1, token.size() - bracket - 2);
      size_t colon = slice.find(':');
      require(colon != std::string::npos, ErrorKind::Config,
              "channel slice must be 'start:stop' in '" + token + "'");
      int start = 0, stop = 0;
      try {
        start = std::stoi(slice.substr(0, colon));
        stop = std::stoi(slice.substr(colon + 1));
      } catch (const std::exception &) {
        throw Error(ErrorKind::Config, "bad channel slice in '" + token + "'");
      }
      require(start >= 0 && stop > start, ErrorKind::Config,
              "channel slice must be non-empty and non-negative in '" + token + "'");
      for (int c = start; c < stop; ++c) tap.channels.push_back(c);
    }
    set.taps.push_back(tap);
  }
  std::sort(set.taps.begin(), set.taps.end(),
            [](const Tap &a, const Tap &b) { return a.offset < b.offset; });
  for (size_t i = 1; i < set.taps.size(); ++i)
    require(set.taps[i - 1].offset != set.taps[i].offset, ErrorKind::Config,
            "duplicate tap offset in '" + text + "'");
  bool has_zero =
      std::any_of(set.taps.begin(), set.taps.end(),
                  [](const Tap &t) { return t.offset == 0; });
  require(has_zero, ErrorKind::Config, "tap set must contain offset 0");
  return set;
}

StackedSpectrogram stack(const Spectrogram &spec, const TapSet &taps) {
  const int channels = spec.num_channels();
  taps.validate(channels);
  const int bins = spec.num_bins();
  const int frames = spec.num_frames();
  const int dim = taps.stacked_dim(channels);

  StackedSpectrogram out;
  out.taps = taps;
  out.num_channels = channels;
  out.config = spec.config;
  out.num_samples = spec.num_samples;
  out.freq.assign(bins, Eigen::MatrixXcd::Zero(dim, frames));

  for (int f = 0; f < bins; ++f) {
    Eigen::MatrixXcd &dst = out.freq[f];
    int base = 0;
    for (const auto &tap : taps.taps) {
      const int width = tap.width(channels);
      for (int t = 0; t < frames; ++t) {
        const int src = t + tap.offset;
        if (src < 0 || src >= frames) continue;  // zero block at boundaries
        if (tap.channels.empty()) {
          for (int c = 0; c < channels; ++c)
            dst(base + c, t) = spec.channels[c](f, src);
        } else {
          for (int i = 0; i < width; ++i)
            dst(base + i, t) = spec.channels[tap.channels[i]](f, src);
        }
      }
      base += width;
    }
  }
  return out;
}

FreqCovariance masked_covariance(const StackedSpectrogram &stacked,
                                 const ComplexMask &mask) {
  const int bins = stacked.num_bins();
  const int frames = stacked.num_frames();
  require(mask.values.rows() == bins && mask.values.cols() == frames,
          ErrorKind::Data, "mask does not match stacked spectrogram shape");

  FreqCovariance cov;
  cov.kind = mask.role == MaskRole::Noise ? CovarianceKind::MaskedNoise
                                          : CovarianceKind::MaskedSpeech;
  cov.matrices.resize(bins);

  const int channels = stacked.num_channels;
  const int dim = stacked.dim();
  Eigen::MatrixXcd masked(dim, frames);

  for (int f = 0; f < bins; ++f) {
    const Eigen::MatrixXcd &x = stacked.freq[f];
    masked.setZero();
    int base = 0;
    for (const auto &tap : stacked.taps.taps) {
      const int width = tap.width(channels);
      for (int t = 0; t < frames; ++t) {
        const int src = t + tap.offset;
        if (src < 0 || src >= frames) continue;
        const std::complex<double> m = mask.values(f, src);
        masked.block(base, t, width, 1) = m * x.block(base, t, width, 1);
      }
      base += width;
    }

    double denom = mask.values.row(f).squaredNorm();  // offset-0 mask energy
    if (denom < kDenomFloor * frames) {
      denom = kDenomFloor * frames;
      cov.flagged.push_back(f);
    }
    cov.matrices[f] = hermitize((masked * masked.adjoint()) / denom);
  }
  return cov;
}

namespace {

FreqCovariance sigma_covariance(const StackedSpectrogram &stacked,
                                const SigmaPower &sigma2, bool normalized) {
  const int bins = stacked.num_bins();
  const int frames = stacked.num_frames();
  require(sigma2.values.rows() == bins && sigma2.values.cols() == frames,
          ErrorKind::Data, "sigma^2 does not match stacked spectrogram shape");
  require((sigma2.values.array() > 0.0).all(), ErrorKind::Data,
          "sigma^2 must be strictly positive (flooring missing?)");

  FreqCovariance cov;
  cov.kind = normalized ? CovarianceKind::SigmaNormalized
                        : CovarianceKind::SigmaWeighted;
  cov.matrices.resize(bins);

  Eigen::MatrixXcd scaled(stacked.dim(), frames);
  for (int f = 0; f < bins; ++f) {
    const Eigen::MatrixXcd &x = stacked.freq[f];
    double weight_sum = 0.0;
    for (int t = 0; t < frames; ++t) {
      const double w = 1.0 / sigma2.values(f, t);
      scaled.col(t) = x.col(t) * std::sqrt(w);
      weight_sum += w;
    }
    Eigen::MatrixXcd acc = scaled * scaled.adjoint();
    if (normalized && weight_sum > 0.0) acc /= weight_sum;
    cov.matrices[f] = hermitize(acc);
  }
  return cov;
}

}  // namespace

FreqCovariance sigma_weighted_covariance(const StackedSpectrogram &stacked,
                                         const SigmaPower &sigma2) {
  return sigma_covariance(stacked, sigma2, false);
}

FreqCovariance sigma_normalized_covariance(const StackedSpectrogram &stacked,
                                           const SigmaPower &sigma2) {
  return sigma_covariance(stacked, sigma2, true);
}

}  // namespace tapbeam

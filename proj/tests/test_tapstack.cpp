// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <complex>

#include "rng.hpp"
#include "tapstack.hpp"

using namespace tapbeam;

namespace {

Spectrogram random_spec(int channels, int bins, int frames, uint64_t seed) {
  Rng rng(seed);
  Spectrogram spec;
  spec.num_samples = static_cast<int64_t>(frames) * spec.config.hop;
  for (int m = 0; m < channels; ++m) {
    Eigen::MatrixXcd plane(bins, frames);
    for (int t = 0; t < frames; ++t)
      for (int f = 0; f < bins; ++f)
        plane(f, t) = std::complex<double>(rng.normal(), rng.normal());
    spec.channels.push_back(plane);
  }
  return spec;
}

// Stacked observation for one (f, t) built directly from the definition:
// ascending tap offsets, channel blocks, zeros outside the frame range.
Eigen::VectorXcd stack_oracle(const Spectrogram &spec, const TapSet &taps,
                              int f, int t) {
  const int channels = spec.num_channels();
  const int frames = spec.num_frames();
  Eigen::VectorXcd out(taps.stacked_dim(channels));
  int base = 0;
  for (const auto &tap : taps.taps) {
    std::vector<int> chans = tap.channels;
    if (chans.empty())
      for (int c = 0; c < channels; ++c) chans.push_back(c);
    for (size_t i = 0; i < chans.size(); ++i) {
      int src = t + tap.offset;
      out(base + static_cast<int>(i)) =
          (src >= 0 && src < frames) ? spec.channels[chans[i]](f, src) : 0.0;
    }
    base += static_cast<int>(chans.size());
  }
  return out;
}

}  // namespace

TEST_CASE("tap parsing") {
  TapSet t1 = parse_taps("0");
  CHECK(t1.taps.size() == 1);
  CHECK(t1.taps[0].offset == 0);
  CHECK(t1.taps[0].channels.empty());

  TapSet t2 = parse_taps("1,0,-1");
  REQUIRE(t2.taps.size() == 3);
  CHECK(t2.taps[0].offset == -1);
  CHECK(t2.taps[1].offset == 0);
  CHECK(t2.taps[2].offset == 1);

  TapSet t3 = parse_taps(" -3[0:6], 0 ");
  REQUIRE(t3.taps.size() == 2);
  CHECK(t3.taps[0].offset == -3);
  REQUIRE(t3.taps[0].channels.size() == 6);
  CHECK(t3.taps[0].channels.front() == 0);
  CHECK(t3.taps[0].channels.back() == 5);
  CHECK(t3.to_string() == "-3[0:6],0");
  CHECK(parse_taps(t3.to_string()).to_string() == t3.to_string());

  CHECK_THROWS_AS(parse_taps(""), Error);
  CHECK_THROWS_AS(parse_taps("a"), Error);
  CHECK_THROWS_AS(parse_taps("0,0"), Error);
  CHECK_THROWS_AS(parse_taps("1,2"), Error);       // no offset 0
  CHECK_THROWS_AS(parse_taps("-3[6:0],0"), Error); // empty slice
  CHECK_THROWS_AS(parse_taps("0[0:0]"), Error);
}

TEST_CASE("tap validation against the channel count") {
  TapSet t = parse_taps("-3[0:6],0");
  t.validate(8);
  CHECK_THROWS_AS(t.validate(4), Error);  // slice reaches channel 5
}

TEST_CASE("reference index walks tap blocks") {
  CHECK(parse_taps("0").reference_index(8, 3) == 3);
  CHECK(parse_taps("-1,0,1").reference_index(4, 2) == 6);
  CHECK(parse_taps("-3[0:6],0").reference_index(8, 0) == 6);
  CHECK(parse_taps("0[2:5]").reference_index(8, 3) == 1);
  CHECK_THROWS_AS(parse_taps("0[2:5]").reference_index(8, 0), Error);
}

TEST_CASE("stacking matches the direct definition including boundaries") {
  Spectrogram spec = random_spec(2, 3, 5, 40);
  for (const char *text : {"0", "-1,0", "-1,0,1", "-2[0:1],0"}) {
    TapSet taps = parse_taps(text);
    StackedSpectrogram stacked = stack(spec, taps);
    REQUIRE(stacked.num_bins() == 3);
    REQUIRE(stacked.num_frames() == 5);
    for (int f = 0; f < 3; ++f)
      for (int t = 0; t < 5; ++t)
        CHECK((stacked.freq[f].col(t) - stack_oracle(spec, taps, f, t))
                  .norm() == 0.0);
  }
}

TEST_CASE("masked covariance matches brute-force summation") {
  Spectrogram spec = random_spec(3, 4, 7, 50);
  ComplexMask mask;
  mask.role = MaskRole::Speech;
  {
    Rng rng(51);
    mask.values.resize(4, 7);
    for (int t = 0; t < 7; ++t)
      for (int f = 0; f < 4; ++f)
        mask.values(f, t) = std::complex<double>(rng.normal(), rng.normal());
  }

  for (const char *text : {"0", "-1,0", "-1,0,1"}) {
    TapSet taps = parse_taps(text);
    StackedSpectrogram stacked = stack(spec, taps);
    FreqCovariance cov = masked_covariance(stacked, mask);

    const int dim = taps.stacked_dim(3);
    for (int f = 0; f < 4; ++f) {
      Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(dim, dim);
      double den = 0.0;
      for (int t = 0; t < 7; ++t) {
        // Mask shifted per tap exactly like the spectrogram itself.
        Eigen::VectorXcd v(dim);
        int base = 0;
        for (const auto &tap : taps.taps) {
          int width = tap.width(3);
          int src = t + tap.offset;
          for (int i = 0; i < width; ++i) {
            std::complex<double> y =
                (src >= 0 && src < 7) ? spec.channels[i](f, src) : 0.0;
            std::complex<double> m =
                (src >= 0 && src < 7) ? mask.values(f, src) : 0.0;
            v(base + i) = m * y;
          }
          base += width;
        }
        num += v * v.adjoint();
        den += std::norm(mask.values(f, t));
      }
      Eigen::MatrixXcd expected = 0.5 * (num + num.adjoint()) / den;
      CHECK((cov.matrices[f] - expected).norm() < 1e-12 * expected.norm());
    }
  }
}

TEST_CASE("sigma covariances match brute-force summation") {
  Spectrogram spec = random_spec(2, 3, 6, 60);
  SigmaPower sigma;
  {
    Rng rng(61);
    sigma.values.resize(3, 6);
    for (int t = 0; t < 6; ++t)
      for (int f = 0; f < 3; ++f) sigma.values(f, t) = 0.1 + rng.uniform();
  }
  TapSet taps = parse_taps("-1,0,1");
  StackedSpectrogram stacked = stack(spec, taps);
  FreqCovariance weighted = sigma_weighted_covariance(stacked, sigma);
  FreqCovariance normalized = sigma_normalized_covariance(stacked, sigma);
  CHECK(weighted.kind == CovarianceKind::SigmaWeighted);
  CHECK(normalized.kind == CovarianceKind::SigmaNormalized);

  const int dim = taps.stacked_dim(2);
  for (int f = 0; f < 3; ++f) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    double wsum = 0.0;
    for (int t = 0; t < 6; ++t) {
      Eigen::VectorXcd v = stack_oracle(spec, taps, f, t);
      acc += v * v.adjoint() / sigma.values(f, t);
      wsum += 1.0 / sigma.values(f, t);
    }
    Eigen::MatrixXcd acc_h = 0.5 * (acc + acc.adjoint());
    CHECK((weighted.matrices[f] - acc_h).norm() < 1e-12 * acc_h.norm());
    CHECK((normalized.matrices[f] - acc_h / wsum).norm() <
          1e-12 * (acc_h.norm() / wsum));
  }
}

TEST_CASE("sigma-normalized covariance ignores global sigma scale") {
  Spectrogram spec = random_spec(2, 4, 8, 70);
  SigmaPower sigma;
  {
    Rng rng(71);
    sigma.values.resize(4, 8);
    for (int t = 0; t < 8; ++t)
      for (int f = 0; f < 4; ++f) sigma.values(f, t) = 0.05 + rng.uniform();
  }
  TapSet taps = parse_taps("-1,0,1");
  StackedSpectrogram stacked = stack(spec, taps);
  FreqCovariance base = sigma_normalized_covariance(stacked, sigma);
  for (double c : {1e-3, 7.0, 1e4}) {
    SigmaPower scaled;
    scaled.values = c * sigma.values;
    FreqCovariance other = sigma_normalized_covariance(stacked, scaled);
    for (int f = 0; f < 4; ++f)
      CHECK((base.matrices[f] - other.matrices[f]).norm() <
            1e-12 * base.matrices[f].norm());
  }
}

TEST_CASE("covariances are Hermitian and near-positive-semidefinite") {
  Spectrogram spec = random_spec(3, 5, 9, 80);
  ComplexMask mask;
  {
    Rng rng(81);
    mask.values.resize(5, 9);
    for (int t = 0; t < 9; ++t)
      for (int f = 0; f < 5; ++f)
        mask.values(f, t) = std::complex<double>(rng.normal(), rng.normal());
  }
  StackedSpectrogram stacked = stack(spec, parse_taps("-1,0"));
  FreqCovariance cov = masked_covariance(stacked, mask);
  for (const auto &m : cov.matrices) {
    CHECK((m - m.adjoint()).norm() <= 1e-12 * m.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * m.trace().real());
  }
}

TEST_CASE("all-zero mask floors the denominator and flags the bin") {
  Spectrogram spec = random_spec(2, 2, 4, 90);
  ComplexMask mask;
  mask.values = Eigen::MatrixXcd::Zero(2, 4);
  mask.values(1, 2) = std::complex<double>(1.0, 0.0);  // bin 1 stays live
  StackedSpectrogram stacked = stack(spec, parse_taps("0"));
  FreqCovariance cov = masked_covariance(stacked, mask);
  REQUIRE(cov.flagged.size() == 1);
  CHECK(cov.flagged[0] == 0);
  CHECK(cov.matrices[0].allFinite());
}

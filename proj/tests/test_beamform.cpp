// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <complex>

#include "beamform.hpp"
#include "rng.hpp"

using namespace tapbeam;

namespace {

const std::complex<double> kI(0.0, 1.0);

Eigen::MatrixXcd random_hpd(int dim, Rng *rng) {
  Eigen::MatrixXcd g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      g(i, j) = std::complex<double>(rng->normal(), rng->normal());
  Eigen::MatrixXcd a = g * g.adjoint();
  a += 0.1 * Eigen::MatrixXcd::Identity(dim, dim);
  return 0.5 * (a + a.adjoint());
}

FreqCovariance one_bin(const Eigen::MatrixXcd &m, CovarianceKind kind) {
  FreqCovariance cov;
  cov.matrices.push_back(m);
  cov.kind = kind;
  return cov;
}

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

}  // namespace

TEST_CASE("hermitian solve inverts a diagonal system") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 4.0;
  Eigen::MatrixXcd x = hermitian_solve(a, Eigen::MatrixXcd::Identity(2, 2), 1e-5);
  CHECK(std::abs(x(0, 0).real() - 0.5) < 1e-4);
  CHECK(std::abs(x(1, 1).real() - 0.25) < 1e-4);
  CHECK(std::abs(x(0, 1)) < 1e-12);
}

TEST_CASE("hermitian solve rejects a hopeless system") {
  Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(3, 3);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Identity(3, 3);
  try {
    hermitian_solve(zero, b, 1e-5);
    FAIL("expected a numeric error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Numeric);
  }
  CHECK_THROWS_AS(hermitian_solve(Eigen::MatrixXcd::Zero(2, 3), b, 1e-5), Error);
}

// Trace normalization cancels the diagonal loading when the denominator is
// the identity, so these closed forms hold to machine precision.
TEST_CASE("trace-normalized solve on frozen rank-one examples") {
  TapSet taps = parse_taps("0");
  SolverConfig cfg;
  FreqCovariance den = one_bin(Eigen::MatrixXcd::Identity(2, 2),
                               CovarianceKind::MaskedNoise);

  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  FreqCovariance num = one_bin(v * v.adjoint(), CovarianceKind::MaskedSpeech);
  BeamformerWeights w = solve_mvdr(den, num, taps, 2, cfg);
  CHECK(std::abs(w.weights(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(w.weights(1, 0) - 0.5) < 1e-12);
  CHECK(w.flagged.empty());

  num = one_bin(Eigen::MatrixXcd::Identity(2, 2), CovarianceKind::MaskedSpeech);
  w = solve_mvdr(den, num, taps, 2, cfg);
  CHECK(std::abs(w.weights(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(w.weights(1, 0)) < 1e-12);

  v << 1.0, kI;
  num = one_bin(v * v.adjoint(), CovarianceKind::MaskedSpeech);
  w = solve_mvdr(den, num, taps, 2, cfg);
  CHECK(std::abs(w.weights(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(w.weights(1, 0) - 0.5 * kI) < 1e-12);

  cfg.reference_channel = 1;
  w = solve_mvdr(den, num, taps, 2, cfg);
  // w = v conj(v_1) / |v|^2; the response w^H v equals v_1, not conj(v_1).
  std::complex<double> response = w.weights.col(0).adjoint() * v;
  CHECK(std::abs(response - kI) < 1e-12);
}

TEST_CASE("rank-one numerators give a distortionless response") {
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const int channels = static_cast<int>(rng.uniform_int(2, 4));
    const char *tap_text = (trial % 2 == 0) ? "0" : "-1,0,1";
    TapSet taps = parse_taps(tap_text);
    const int dim = taps.stacked_dim(channels);
    SolverConfig cfg;
    cfg.reference_channel = static_cast<int>(rng.uniform_int(0, channels - 1));
    const int u_index = taps.reference_index(channels, cfg.reference_channel);

    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i)
      v(i) = std::complex<double>(rng.normal(), rng.normal());
    FreqCovariance den = one_bin(random_hpd(dim, &rng),
                                 CovarianceKind::MaskedNoise);
    FreqCovariance num = one_bin(v * v.adjoint(), CovarianceKind::MaskedSpeech);

    BeamformerWeights w = solve_mvdr(den, num, taps, channels, cfg);
    REQUIRE(w.flagged.empty());
    std::complex<double> response = w.weights.col(0).adjoint() * v;
    CHECK(std::abs(response - v(u_index)) < 1e-8);
  }
}

TEST_CASE("sigma-weighted and sigma-normalized solves agree at sigma one") {
  Spectrogram spec = random_spec(2, 5, 6, 300);
  TapSet taps = parse_taps("0");
  StackedSpectrogram stacked = stack(spec, taps);

  SigmaPower ones;
  ones.values = Eigen::MatrixXd::Ones(5, 6);
  FreqCovariance r = sigma_weighted_covariance(stacked, ones);
  FreqCovariance r_tilde = sigma_normalized_covariance(stacked, ones);

  ComplexMask mask;
  {
    Rng rng(301);
    mask.values.resize(5, 6);
    for (int t = 0; t < 6; ++t)
      for (int f = 0; f < 5; ++f)
        mask.values(f, t) = std::complex<double>(rng.normal(), rng.normal());
  }
  FreqCovariance num = masked_covariance(stacked, mask);

  SolverConfig cfg;
  BeamformerWeights wpd = solve_wpd(r, num, taps, 2, cfg);
  BeamformerWeights wpdpp = solve_wpdpp(r_tilde, num, taps, 2, cfg);
  for (int f = 0; f < 5; ++f)
    CHECK((wpd.weights.col(f) - wpdpp.weights.col(f)).norm() <
          1e-12 * wpd.weights.col(f).norm());
}

TEST_CASE("zero numerator falls back to a flagged passthrough") {
  TapSet taps = parse_taps("0");
  SolverConfig cfg;
  cfg.reference_channel = 1;
  FreqCovariance den = one_bin(Eigen::MatrixXcd::Identity(2, 2),
                               CovarianceKind::MaskedNoise);
  FreqCovariance num = one_bin(Eigen::MatrixXcd::Zero(2, 2),
                               CovarianceKind::MaskedSpeech);
  BeamformerWeights w = solve_mvdr(den, num, taps, 2, cfg);
  REQUIRE(w.flagged.size() == 1);
  CHECK(w.flagged[0] == 0);
  CHECK(std::abs(w.weights(0, 0)) == 0.0);
  CHECK(std::abs(w.weights(1, 0) - 1.0) == 0.0);
}

TEST_CASE("solver rejects covariances of the wrong kind") {
  TapSet taps = parse_taps("0");
  SolverConfig cfg;
  Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
  FreqCovariance masked = one_bin(eye, CovarianceKind::MaskedNoise);
  FreqCovariance weighted = one_bin(eye, CovarianceKind::SigmaWeighted);
  FreqCovariance normalized = one_bin(eye, CovarianceKind::SigmaNormalized);

  CHECK_THROWS_AS(solve_mvdr(weighted, masked, taps, 2, cfg), Error);
  CHECK_THROWS_AS(solve_wpd(masked, masked, taps, 2, cfg), Error);
  CHECK_THROWS_AS(solve_wpd(normalized, masked, taps, 2, cfg), Error);
  CHECK_THROWS_AS(solve_wpdpp(weighted, masked, taps, 2, cfg), Error);
}

TEST_CASE("applying weights is the per-frequency inner product") {
  Spectrogram spec = random_spec(2, 4, 5, 400);
  TapSet taps = parse_taps("-1,0");
  StackedSpectrogram stacked = stack(spec, taps);

  BeamformerWeights w;
  w.taps = taps;
  {
    Rng rng(401);
    w.weights.resize(4, 4);
    for (int f = 0; f < 4; ++f)
      for (int i = 0; i < 4; ++i)
        w.weights(i, f) = std::complex<double>(rng.normal(), rng.normal());
  }

  Spectrogram out = apply_weights(w, stacked);
  REQUIRE(out.num_channels() == 1);
  CHECK(out.num_samples == spec.num_samples);
  for (int f = 0; f < 4; ++f)
    for (int t = 0; t < 5; ++t) {
      std::complex<double> expected =
          w.weights.col(f).dot(stacked.freq[f].col(t));
      CHECK(std::abs(out.channels[0](f, t) - expected) < 1e-12);
    }

  BeamformerWeights wrong = w;
  wrong.taps = parse_taps("0[0:4]");
  CHECK_THROWS_AS(apply_weights(wrong, stacked), Error);
}

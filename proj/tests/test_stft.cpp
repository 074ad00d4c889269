// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <complex>

#include "rng.hpp"
#include "stft.hpp"

using namespace tapbeam;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent reflect fold, abcb|abcba|bcba style.
int64_t reflect_oracle(int64_t i, int64_t n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

MultiChannelAudio random_audio(int channels, int64_t n, uint64_t seed) {
  Rng rng(seed);
  MultiChannelAudio a;
  a.samples.resize(channels, n);
  for (int c = 0; c < channels; ++c)
    for (int64_t i = 0; i < n; ++i) a.samples(c, i) = rng.normal();
  return a;
}

double reconstruction_snr(const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
  return 10.0 * std::log10(x.squaredNorm() / (x - y).squaredNorm());
}

}  // namespace

TEST_CASE("periodic Hann window") {
  Eigen::VectorXd w = hann_periodic(512);
  CHECK(w(0) == doctest::Approx(0.0));
  CHECK(w(256) == doctest::Approx(1.0));
  for (int i = 1; i < 512; ++i)
    CHECK(w(i) == doctest::Approx(w(512 - i)).epsilon(1e-12));
}

TEST_CASE("frame count is ceil(n / hop)") {
  StftConfig cfg;
  auto frames = [&](int64_t n) {
    MultiChannelAudio a = random_audio(1, n, 7);
    return stft_analyze(a, cfg).num_frames();
  };
  CHECK(frames(1) == 1);
  CHECK(frames(256) == 1);
  CHECK(frames(257) == 2);
  CHECK(frames(512) == 2);
  CHECK(frames(513) == 3);
  CHECK(frames(16000) == 63);
}

TEST_CASE("analysis matches a brute-force windowed DFT") {
  StftConfig cfg;
  cfg.window_len = 16;
  cfg.hop = 8;
  cfg.fft_len = 16;
  MultiChannelAudio a = random_audio(1, 45, 11);
  Spectrogram spec = stft_analyze(a, cfg);
  REQUIRE(spec.num_frames() == 6);
  REQUIRE(spec.num_bins() == 9);

  Eigen::VectorXd w = hann_periodic(16);
  for (int t = 0; t < 6; ++t) {
    int64_t start = static_cast<int64_t>(t) * 8 - 8;
    for (int f = 0; f < 9; ++f) {
      std::complex<double> acc(0, 0);
      for (int i = 0; i < 16; ++i) {
        double v = a.samples(0, reflect_oracle(start + i, 45)) * w(i);
        double ph = -2.0 * kPi * f * i / 16.0;
        acc += v * std::complex<double>(std::cos(ph), std::sin(ph));
      }
      CHECK(std::abs(spec.channels[0](f, t) - acc) < 1e-10 * (1.0 + std::abs(acc)));
    }
  }
}

TEST_CASE("round trip reconstructs the signal") {
  StftConfig cfg;
  for (auto n : {int64_t{777}, int64_t{16000}, int64_t{16384}}) {
    MultiChannelAudio a = random_audio(2, n, 100 + n);
    MultiChannelAudio b = stft_synthesize(stft_analyze(a, cfg));
    REQUIRE(b.num_samples() == n);
    REQUIRE(b.channels() == 2);
    for (int c = 0; c < 2; ++c)
      CHECK(reconstruction_snr(a.samples.row(c), b.samples.row(c)) > 60.0);
  }
}

TEST_CASE("one-sided spectrum satisfies Parseval per frame") {
  Rng rng(5);
  for (int iter = 0; iter < 4; ++iter) {
    Eigen::VectorXd x(512);
    for (int i = 0; i < 512; ++i) x(i) = rng.normal();
    Eigen::VectorXcd X = rfft(x, 512);
    double spec_energy = std::norm(X(0)) + std::norm(X(256));
    for (int f = 1; f < 256; ++f) spec_energy += 2.0 * std::norm(X(f));
    spec_energy /= 512.0;
    CHECK(std::abs(spec_energy - x.squaredNorm()) <
          1e-8 * x.squaredNorm());
  }
}

TEST_CASE("analysis is linear") {
  StftConfig cfg;
  MultiChannelAudio x = random_audio(1, 1000, 21);
  MultiChannelAudio y = random_audio(1, 1000, 22);
  MultiChannelAudio z;
  z.samples = 2.0 * x.samples - 3.0 * y.samples;
  Eigen::MatrixXcd combined = stft_analyze(z, cfg).channels[0];
  Eigen::MatrixXcd expected = 2.0 * stft_analyze(x, cfg).channels[0] -
                              3.0 * stft_analyze(y, cfg).channels[0];
  double scale = expected.norm();
  CHECK((combined - expected).norm() < 1e-10 * scale);
}

TEST_CASE("rfft and irfft invert each other and match a naive DFT") {
  Rng rng(31);
  Eigen::VectorXd x(64);
  for (int i = 0; i < 64; ++i) x(i) = rng.normal();
  Eigen::VectorXcd X = rfft(x, 64);
  REQUIRE(X.size() == 33);
  for (int f = 0; f < 33; ++f) {
    std::complex<double> acc(0, 0);
    for (int i = 0; i < 64; ++i) {
      double ph = -2.0 * kPi * f * i / 64.0;
      acc += x(i) * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    CHECK(std::abs(X(f) - acc) < 1e-10 * (1.0 + std::abs(acc)));
  }
  Eigen::VectorXd back = irfft(X, 64);
  CHECK((back - x).norm() < 1e-12 * x.norm());
}

TEST_CASE("invalid configurations are rejected") {
  StftConfig cfg;
  cfg.hop = 0;
  MultiChannelAudio a = random_audio(1, 100, 3);
  CHECK_THROWS_AS(stft_analyze(a, cfg), Error);
  cfg.hop = 768;  // larger than the window
  CHECK_THROWS_AS(stft_analyze(a, cfg), Error);
}

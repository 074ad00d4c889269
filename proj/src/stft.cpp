// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace tapbeam {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan creation is not thread-safe; executions via the new-array
// interface are. Plans are cached per FFT length and created with
// FFTW_UNALIGNED so they apply to any caller buffer.
class FftBackend {
 public:
  static FftBackend &instance() {
    static FftBackend backend;
    return backend;
  }

  void forward(int n, double *in, std::complex<double> *out) {
    fftw_execute_dft_r2c(plan_forward(n), in,
                         reinterpret_cast<fftw_complex *>(out));
  }

  // FFTW's c2r destroys its input and returns an unscaled transform.
  void inverse(int n, std::complex<double> *in, double *out) {
    fftw_execute_dft_c2r(plan_inverse(n),
                         reinterpret_cast<fftw_complex *>(in), out);
  }

 private:
  fftw_plan plan_forward(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = forward_.find(n);
    if (it != forward_.end()) return it->second;
    std::vector<double> re(n, 0.0);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(
        n, re.data(), reinterpret_cast<fftw_complex *>(cx.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, ErrorKind::Numeric, "FFTW r2c plan failed");
    forward_[n] = p;
    return p;
  }

  fftw_plan plan_inverse(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = inverse_.find(n);
    if (it != inverse_.end()) return it->second;
    std::vector<double> re(n, 0.0);
    std::vector<std::complex<double>> cx(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_c2r_1d(
        n, reinterpret_cast<fftw_complex *>(cx.data()), re.data(),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(p != nullptr, ErrorKind::Numeric, "FFTW c2r plan failed");
    inverse_[n] = p;
    return p;
  }

  std::mutex mutex_;
  std::map<int, fftw_plan> forward_;
  std::map<int, fftw_plan> inverse_;
};

// Reflecting boundary index (abcb|abcba|bcba for N=4), folded modularly so
// any integer maps into [0, N).
int64_t reflect_index(int64_t i, int64_t n) {
  if (n == 1) return 0;
  int64_t period = 2 * (n - 1);
  int64_t j = i % period;
  if (j < 0) j += period;
  return j < n ? j : period - j;
}

}  // namespace

Eigen::VectorXd hann_periodic(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i)
    w(i) = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
  return w;
}

Spectrogram stft_analyze(const MultiChannelAudio &audio, const StftConfig &cfg) {
  cfg.validate();
  audio.validate();

  const int win = cfg.window_len;
  const int hop = cfg.hop;
  const int nfft = cfg.fft_len;
  const int bins = cfg.num_bins();
  const int64_t n = audio.num_samples();
  const int pad = win / 2;
  const int frames = static_cast<int>((n + hop - 1) / hop);

  Eigen::VectorXd window = hann_periodic(win);

  Spectrogram spec;
  spec.config = cfg;
  spec.num_samples = n;
  spec.channels.resize(audio.channels());

  std::vector<double> frame(nfft);
  std::vector<std::complex<double>> out(bins);
  FftBackend &fft = FftBackend::instance();

  for (int m = 0; m < audio.channels(); ++m) {
    Eigen::MatrixXcd &ch = spec.channels[m];
    ch.resize(bins, frames);
    for (int t = 0; t < frames; ++t) {
      const int64_t start = static_cast<int64_t>(t) * hop - pad;
      for (int i = 0; i < win; ++i) {
        int64_t src = start + i;
        double v;
        if (src >= 0 && src < n) {
          v = audio.samples(m, src);
        } else {
          v = audio.samples(m, reflect_index(src, n));
        }
        frame[i] = v * window(i);
      }
      for (int i = win; i < nfft; ++i) frame[i] = 0.0;
      fft.forward(nfft, frame.data(), out.data());
      for (int f = 0; f < bins; ++f) ch(f, t) = out[f];
    }
  }
  return spec;
}

Eigen::VectorXcd rfft(const Eigen::VectorXd &x, int n) {
  require(n > 0 && x.size() <= n, ErrorKind::Config, "bad FFT length");
  std::vector<double> in(n, 0.0);
  std::copy(x.data(), x.data() + x.size(), in.begin());
  Eigen::VectorXcd out(n / 2 + 1);
  FftBackend::instance().forward(n, in.data(), out.data());
  return out;
}

Eigen::VectorXd irfft(const Eigen::VectorXcd &spectrum, int n) {
  require(n > 0 && spectrum.size() == n / 2 + 1, ErrorKind::Config,
          "bad inverse FFT length");
  std::vector<std::complex<double>> in(spectrum.data(),
                                       spectrum.data() + spectrum.size());
  Eigen::VectorXd out(n);
  FftBackend::instance().inverse(n, in.data(), out.data());
  return out / static_cast<double>(n);
}

MultiChannelAudio stft_synthesize(const Spectrogram &spec) {
  const StftConfig &cfg = spec.config;
  cfg.validate();
  require(!spec.channels.empty(), ErrorKind::Data, "empty spectrogram");

  const int win = cfg.window_len;
  const int hop = cfg.hop;
  const int nfft = cfg.fft_len;
  const int bins = cfg.num_bins();
  const int frames = spec.num_frames();
  require(spec.num_bins() == bins, ErrorKind::Data,
          "spectrogram bin count does not match its configuration");

  const int pad = win / 2;
  int64_t n = spec.num_samples;
  if (n <= 0) n = static_cast<int64_t>(frames) * hop;
  const int64_t padded_len = n + 2 * pad + win;

  Eigen::VectorXd window = hann_periodic(win);

  MultiChannelAudio audio;
  audio.sample_rate = cfg.sample_rate;
  audio.samples.resize(spec.num_channels(), n);

  std::vector<std::complex<double>> in(bins);
  std::vector<double> frame(nfft);
  Eigen::VectorXd acc(padded_len);
  Eigen::VectorXd wsum(padded_len);
  FftBackend &fft = FftBackend::instance();

  for (int m = 0; m < spec.num_channels(); ++m) {
    acc.setZero();
    wsum.setZero();
    const Eigen::MatrixXcd &ch = spec.channels[m];
    for (int t = 0; t < frames; ++t) {
      for (int f = 0; f < bins; ++f) in[f] = ch(f, t);
      fft.inverse(nfft, in.data(), frame.data());
      const int64_t start = static_cast<int64_t>(t) * hop;
      for (int i = 0; i < win; ++i) {
        acc(start + i) += frame[i] / nfft * window(i);
        wsum(start + i) += window(i) * window(i);
      }
    }
    for (int64_t i = 0; i < n; ++i) {
      double denom = wsum(pad + i);
      audio.samples(m, i) = denom > 1e-12 ? acc(pad + i) / denom : 0.0;
    }
  }
  return audio;
}

}  // namespace tapbeam

// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "features.hpp"

#include <cmath>
#include <filesystem>

#include "common.hpp"
#include "tensor_file.hpp"

namespace tapbeam {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLpsEps = 1e-12;

void check_pairs(const std::vector<MicPair> &pairs, int num_mics) {
  require(!pairs.empty(), ErrorKind::Config, "no microphone pairs");
  for (const auto &p : pairs) {
    require(p.first >= 0 && p.first < num_mics && p.second >= 0 &&
                p.second < num_mics,
            ErrorKind::Config, "pair index out of range");
    require(p.first != p.second, ErrorKind::Config,
            "pair uses the same microphone twice");
  }
}

}  // namespace

std::vector<MicPair> default_pairs(int num_mics) {
  require(num_mics >= 2, ErrorKind::Config,
          "pair features need at least two microphones");
  std::vector<MicPair> pairs;
  for (int i = 0; i + 1 < num_mics; ++i) pairs.emplace_back(i, i + 1);
  MicPair widest{0, num_mics - 1};
  bool seen = false;
  for (const auto &p : pairs) seen = seen || p == widest;
  if (!seen) pairs.push_back(widest);
  return pairs;
}

Eigen::MatrixXd lps(const Eigen::MatrixXcd &channel) {
  return (channel.cwiseAbs2().array() + kLpsEps).log().matrix();
}

std::vector<Eigen::MatrixXd> ipd(const Spectrogram &spec,
                                 const std::vector<MicPair> &pairs) {
  check_pairs(pairs, spec.num_channels());
  std::vector<Eigen::MatrixXd> out;
  out.reserve(pairs.size());
  for (const auto &p : pairs) {
    const Eigen::MatrixXcd &a = spec.channels[p.first];
    const Eigen::MatrixXcd &b = spec.channels[p.second];
    Eigen::MatrixXd plane(a.rows(), a.cols());
    for (int64_t t = 0; t < a.cols(); ++t)
      for (int64_t f = 0; f < a.rows(); ++f)
        plane(f, t) = std::arg(a(f, t) * std::conj(b(f, t)));
    out.push_back(std::move(plane));
  }
  return out;
}

Eigen::MatrixXcd steering_vector(const ArrayGeometry &geometry, double doa_deg,
                                 const StftConfig &cfg, double speed_of_sound) {
  cfg.validate();
  require(speed_of_sound > 0, ErrorKind::Config, "bad speed of sound");
  const int m = geometry.num_mics();
  require(m > 0, ErrorKind::Config, "empty array");
  const int bins = cfg.num_bins();
  double az = doa_deg * kPi / 180.0;
  Eigen::Vector3d dir(std::cos(az), std::sin(az), 0.0);

  Eigen::MatrixXcd v(m, bins);
  for (int i = 0; i < m; ++i) {
    // A plane wave from the DOA reaches mics nearer the source earlier.
    double tau = -geometry.positions.row(i).dot(dir) / speed_of_sound;
    for (int f = 0; f < bins; ++f) {
      double freq_hz = static_cast<double>(f) * cfg.sample_rate / cfg.fft_len;
      double phase = -2.0 * kPi * freq_hz * tau;
      v(i, f) = std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return v;
}

Eigen::MatrixXd directional_feature(const Spectrogram &spec,
                                    const Eigen::MatrixXcd &steering,
                                    const std::vector<MicPair> &pairs) {
  check_pairs(pairs, spec.num_channels());
  require(steering.rows() == spec.num_channels() &&
              steering.cols() == spec.num_bins(),
          ErrorKind::Config, "steering shape does not match the spectrogram");

  const int bins = spec.num_bins();
  const int frames = spec.num_frames();
  Eigen::MatrixXd df = Eigen::MatrixXd::Zero(bins, frames);
  for (const auto &p : pairs) {
    const Eigen::MatrixXcd &a = spec.channels[p.first];
    const Eigen::MatrixXcd &b = spec.channels[p.second];
    for (int t = 0; t < frames; ++t) {
      for (int f = 0; f < bins; ++f) {
        std::complex<double> obs = a(f, t) * std::conj(b(f, t));
        double mag = std::abs(obs);
        if (mag <= 0.0) continue;
        std::complex<double> pred =
            steering(p.first, f) * std::conj(steering(p.second, f));
        df(f, t) += (obs / mag * std::conj(pred)).real();
      }
    }
  }
  df /= static_cast<double>(pairs.size());
  return df;
}

FeatureBlock compute_features(const Spectrogram &spec,
                              const ArrayGeometry &geometry, double doa_deg,
                              std::vector<MicPair> pairs) {
  require(spec.num_channels() == geometry.num_mics(), ErrorKind::Config,
          "geometry does not match the spectrogram channel count");
  if (pairs.empty()) pairs = default_pairs(geometry.num_mics());
  check_pairs(pairs, geometry.num_mics());
  for (const auto &p : pairs) {
    double d = (geometry.positions.row(p.first) - geometry.positions.row(p.second))
                   .norm();
    require(d > 1e-9, ErrorKind::Config, "coincident microphones in a pair");
  }

  FeatureBlock block;
  block.pairs = pairs;
  block.lps = lps(spec.channels[0]);
  block.ipd = ipd(spec, pairs);
  Eigen::MatrixXcd steering =
      steering_vector(geometry, doa_deg, spec.config);
  block.df = directional_feature(spec, steering, pairs);
  return block;
}

void dump_features(const FeatureBlock &block, const std::string &out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path root(out_dir);

  TensorFile lps_t;
  lps_t.dtype = "float64";
  lps_t.shape = {block.lps.rows(), block.lps.cols()};
  lps_t.data.assign(block.lps.data(), block.lps.data() + block.lps.size());
  write_tensor((root / "lps.tbt").string(), lps_t);

  require(!block.ipd.empty(), ErrorKind::Data, "feature block has no IPD planes");
  TensorFile ipd_t;
  ipd_t.dtype = "float64";
  ipd_t.shape = {static_cast<int64_t>(block.ipd.size()), block.ipd[0].rows(),
                 block.ipd[0].cols()};
  // Column-major over (pair, f, t): pair index varies fastest.
  ipd_t.data.resize(ipd_t.element_count());
  int64_t np = static_cast<int64_t>(block.ipd.size());
  for (int64_t t = 0; t < block.ipd[0].cols(); ++t)
    for (int64_t f = 0; f < block.ipd[0].rows(); ++f)
      for (int64_t p = 0; p < np; ++p)
        ipd_t.data[p + np * (f + block.ipd[0].rows() * t)] = block.ipd[p](f, t);
  write_tensor((root / "ipd.tbt").string(), ipd_t);

  TensorFile df_t;
  df_t.dtype = "float64";
  df_t.shape = {block.df.rows(), block.df.cols()};
  df_t.data.assign(block.df.data(), block.df.data() + block.df.size());
  write_tensor((root / "df.tbt").string(), df_t);
}

}  // namespace tapbeam

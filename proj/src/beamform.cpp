// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "beamform.hpp"

#include <Eigen/Cholesky>

namespace tapbeam {

namespace {

constexpr double kTraceFloorRel = 1e-10;
constexpr double kResidualTol = 1e-6;

bool try_solve(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b,
               double delta, Eigen::MatrixXcd *x) {
  const int dim = static_cast<int>(a.rows());
  const double scale = a.trace().real() / dim;
  Eigen::MatrixXcd loaded = a;
  if (scale > 0.0)
    loaded += delta * scale * Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(loaded);
  if (ldlt.info() != Eigen::Success) return false;
  *x = ldlt.solve(b);
  if (!x->allFinite()) return false;
  const double bnorm = b.norm();
  if (bnorm > 0.0) {
    const double residual = (loaded * (*x) - b).norm() / bnorm;
    if (residual > kResidualTol) return false;
  }
  return true;
}

}  // namespace

Eigen::MatrixXcd hermitian_solve(const Eigen::MatrixXcd &a,
                                 const Eigen::MatrixXcd &b, double delta,
                                 int max_retries) {
  require(a.rows() == a.cols(), ErrorKind::Data, "matrix must be square");
  require(a.rows() == b.rows(), ErrorKind::Data, "dimension mismatch in solve");
  Eigen::MatrixXcd x;
  double d = delta;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    if (try_solve(a, b, d, &x)) return x;
    d = d > 0.0 ? d * 10.0 : 1e-10;
  }
  throw Error(ErrorKind::Numeric,
              "Hermitian solve stayed singular after retries");
}

namespace {

BeamformerWeights trace_normalized_solve(const FreqCovariance &den,
                                         const FreqCovariance &num,
                                         const TapSet &taps, int num_channels,
                                         const SolverConfig &cfg) {
  cfg.validate();
  taps.validate(num_channels);
  require(den.num_bins() == num.num_bins(), ErrorKind::Data,
          "covariance bin counts differ");
  const int bins = den.num_bins();
  require(bins > 0, ErrorKind::Data, "empty covariances");
  const int dim = taps.stacked_dim(num_channels);
  require(den.matrices[0].rows() == dim && num.matrices[0].rows() == dim,
          ErrorKind::Data, "covariance dimension does not match tap set");
  const int u_index = taps.reference_index(num_channels, cfg.reference_channel);

  BeamformerWeights w;
  w.taps = taps;
  w.reference_channel = cfg.reference_channel;
  w.weights.resize(dim, bins);

  for (int f = 0; f < bins; ++f) {
    try {
      Eigen::MatrixXcd x = hermitian_solve(den.matrices[f], num.matrices[f],
                                           cfg.diagonal_loading,
                                           cfg.max_loading_retries);
      std::complex<double> tr = x.trace();
      const double floor = kTraceFloorRel * x.norm();
      if (std::abs(tr) < floor) tr = floor;
      if (std::abs(tr) == 0.0) throw Error(ErrorKind::Numeric, "zero trace");
      w.weights.col(f) = x.col(u_index) / tr;
      if (!w.weights.col(f).allFinite())
        throw Error(ErrorKind::Numeric, "non-finite weight");
    } catch (const Error &) {
      // passthrough fallback keeps the pipeline alive at a broken frequency
      w.weights.col(f).setZero();
      w.weights(u_index, f) = 1.0;
      w.flagged.push_back(f);
    }
  }
  return w;
}

}  // namespace

BeamformerWeights solve_mvdr(const FreqCovariance &phi_nn,
                             const FreqCovariance &phi_ss, const TapSet &taps,
                             int num_channels, const SolverConfig &cfg) {
  require(phi_nn.kind == CovarianceKind::MaskedNoise ||
              phi_nn.kind == CovarianceKind::MaskedSpeech,
          ErrorKind::Config, "MVDR denominator must be a masked covariance");
  return trace_normalized_solve(phi_nn, phi_ss, taps, num_channels, cfg);
}

BeamformerWeights solve_wpd(const FreqCovariance &r,
                            const FreqCovariance &phi_ss_bar,
                            const TapSet &taps, int num_channels,
                            const SolverConfig &cfg) {
  require(r.kind == CovarianceKind::SigmaWeighted, ErrorKind::Config,
          "WPD denominator must be the sigma-weighted scatter");
  return trace_normalized_solve(r, phi_ss_bar, taps, num_channels, cfg);
}

BeamformerWeights solve_wpdpp(const FreqCovariance &r_tilde,
                              const FreqCovariance &phi_ss_tilde,
                              const TapSet &taps, int num_channels,
                              const SolverConfig &cfg) {
  require(r_tilde.kind == CovarianceKind::SigmaNormalized, ErrorKind::Config,
          "WPD++ denominator must be the sigma-normalized covariance");
  return trace_normalized_solve(r_tilde, phi_ss_tilde, taps, num_channels, cfg);
}

Spectrogram apply_weights(const BeamformerWeights &weights,
                          const StackedSpectrogram &stacked) {
  const int bins = stacked.num_bins();
  const int frames = stacked.num_frames();
  require(weights.weights.cols() == bins, ErrorKind::Data,
          "weights do not match spectrogram bins");
  require(weights.weights.rows() == stacked.dim(), ErrorKind::Data,
          "weights do not match stacked dimension");
  require(weights.taps.to_string() == stacked.taps.to_string(),
          ErrorKind::Data, "weights were solved for a different tap set");

  Spectrogram out;
  out.config = stacked.config;
  out.num_samples = stacked.num_samples;
  out.channels.assign(1, Eigen::MatrixXcd(bins, frames));
  for (int f = 0; f < bins; ++f)
    out.channels[0].row(f) = weights.weights.col(f).adjoint() * stacked.freq[f];
  return out;
}

}  // namespace tapbeam

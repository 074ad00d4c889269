// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_BEAMFORM_HPP_
#define TAPBEAM_BEAMFORM_HPP_

#include "tapstack.hpp"

namespace tapbeam {

struct SolverConfig {
  double diagonal_loading = 1e-5;  // relative to trace(A)/dim
  int max_loading_retries = 3;     // x10 loading per retry
  int reference_channel = 0;

  void validate() const {
    require(diagonal_loading > 0.0, ErrorKind::Config,
            "diagonal loading must be positive");
    require(max_loading_retries >= 0, ErrorKind::Config,
            "retry count must be non-negative");
  }
};

struct BeamformerWeights {
  Eigen::MatrixXcd weights;  // (ML') x F, one column per frequency
  TapSet taps;
  int reference_channel = 0;
  std::vector<int> flagged;  // frequencies that fell back to passthrough
};

// Solves (A + delta * (Re tr(A)/dim) I) X = B with a Hermitian LDLT
// factorization, retrying with 10x loading on breakdown. Throws a numeric
// error after max_retries.
Eigen::MatrixXcd hermitian_solve(const Eigen::MatrixXcd &a,
                                 const Eigen::MatrixXcd &b, double delta,
                                 int max_retries = 3);

// Trace-normalized solves of the common closed form
//   W = Den^-1 Num / Trace(Den^-1 Num),  w = W u
// with u one-hot at (reference channel, offset 0). A frequency whose solve
// stays singular through all retries is flagged and falls back to the
// passthrough weight u.
//
// solve_mvdr covers both the single-tap and multi-tap variants (the tap
// structure lives in the covariances); den must be a masked noise
// covariance. solve_wpd takes the unnormalized sigma-weighted scatter;
// solve_wpdpp the utterance-normalized form.
BeamformerWeights solve_mvdr(const FreqCovariance &phi_nn,
                             const FreqCovariance &phi_ss, const TapSet &taps,
                             int num_channels, const SolverConfig &cfg);
BeamformerWeights solve_wpd(const FreqCovariance &r,
                            const FreqCovariance &phi_ss_bar,
                            const TapSet &taps, int num_channels,
                            const SolverConfig &cfg);
BeamformerWeights solve_wpdpp(const FreqCovariance &r_tilde,
                              const FreqCovariance &phi_ss_tilde,
                              const TapSet &taps, int num_channels,
                              const SolverConfig &cfg);

// Shat(t,f) = w(f)^H Ybar(t,f). Single-channel output spectrogram.
Spectrogram apply_weights(const BeamformerWeights &weights,
                          const StackedSpectrogram &stacked);

}  // namespace tapbeam

#endif  // TAPBEAM_BEAMFORM_HPP_

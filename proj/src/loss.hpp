// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_LOSS_HPP_
#define TAPBEAM_LOSS_HPP_

#include <Eigen/Dense>

#include "common.hpp"

namespace tapbeam {

struct LossValue {
  double value = 0.0;
  bool clipped = false;  // SNR family hit the +/-60 dB guard
  // combo-loss breakdown (raw component values, set when has_components)
  bool has_components = false;
  double mag_mse = 0.0;
  double si_snr = 0.0;
  double c_si_snr = 0.0;
};

// Scale-invariant SNR in dB: project the estimate onto the target, compare
// projected power with residual power. Clipped to [-60, +60] dB.
LossValue si_snr(const Eigen::VectorXd &estimate, const Eigen::VectorXd &target);

// Gradient of si_snr with respect to the estimate. Zero (and clipped=true
// on the value) at the clip boundary, where the loss is flat.
Eigen::VectorXd si_snr_grad(const Eigen::VectorXd &estimate,
                            const Eigen::VectorXd &target);

// Complex-spectrum SI-SNR: real and imaginary parts are concatenated into
// one real vector and scored with a single real scale factor.
LossValue c_si_snr(const Eigen::MatrixXcd &estimate,
                   const Eigen::MatrixXcd &target);

// Gradient with respect to the complex estimate, packed as d/dRe + j d/dIm.
Eigen::MatrixXcd c_si_snr_grad(const Eigen::MatrixXcd &estimate,
                               const Eigen::MatrixXcd &target);

// Magnitude-domain squared error: sum_(t,f) (|S| - |Shat|)^2 over
// nonnegative magnitude matrices.
LossValue mag_mse(const Eigen::MatrixXd &estimate_mag,
                  const Eigen::MatrixXd &target_mag);

Eigen::MatrixXd mag_mse_grad(const Eigen::MatrixXd &estimate_mag,
                             const Eigen::MatrixXd &target_mag);

// Complex-difference variant, sum |S - Shat|^2, kept selectable for
// comparison with the magnitude reading.
LossValue mag_mse_complex(const Eigen::MatrixXcd &estimate,
                          const Eigen::MatrixXcd &target);

// Combo objective: gamma * MagMSE(|est|, |dry|) - beta * SiSNR(wav)
// - CSiSNR(spec). SNR terms enter negated so the total is a minimization
// target. Components carry the raw (unweighted, unnegated) values.
LossValue combo_loss(const Eigen::MatrixXcd &estimate_spec,
                     const Eigen::VectorXd &estimate_wav,
                     const Eigen::MatrixXcd &dry_spec,
                     const Eigen::VectorXd &dry_wav, double gamma = 0.3,
                     double beta = 1.0);

// Combo gradients, treating the spectrogram and waveform arguments as
// independent inputs.
struct ComboGradient {
  Eigen::MatrixXcd spec;  // d combo / d estimate_spec
  Eigen::VectorXd wav;    // d combo / d estimate_wav
};

ComboGradient combo_loss_grad(const Eigen::MatrixXcd &estimate_spec,
                              const Eigen::VectorXd &estimate_wav,
                              const Eigen::MatrixXcd &dry_spec,
                              const Eigen::VectorXd &dry_wav,
                              double gamma = 0.3, double beta = 1.0);

}  // namespace tapbeam

#endif  // TAPBEAM_LOSS_HPP_

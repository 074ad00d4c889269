// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAPBEAM_MASK_HPP_
#define TAPBEAM_MASK_HPP_

#include <Eigen/Dense>

#include "stft.hpp"

namespace tapbeam {

enum class MaskRole {
  Speech,
  Noise,
  Sigma,
};

// Complex ratio mask over one F x T plane. Uncompressed: magnitudes may
// exceed one.
struct ComplexMask {
  Eigen::MatrixXcd values;  // F x T
  MaskRole role = MaskRole::Speech;
};

// sigma^2(t,f): power of the desired dry signal, floored to stay strictly
// positive because downstream weights divide by it.
struct SigmaPower {
  Eigen::MatrixXd values;  // F x T, entries >= floor > 0
  bool degenerate = false;  // all-zero input replaced by a uniform floor
};

// Relative floors; see the corresponding factory functions.
constexpr double kMaskEpsRel = 1e-8;
constexpr double kSigmaEpsRel = 1e-6;

// Complex ratio mask target/mixture = conj(Y).S / (|Y|^2 + eps), computed
// against the reference-channel plane of the mixture.
// eps = 1e-8 * mean(|Y|^2) guards silent bins.
ComplexMask oracle_cirm(const Eigen::MatrixXcd &target,
                        const Eigen::MatrixXcd &mixture, MaskRole role);

// Elementwise complex product, mask broadcast across channels.
Spectrogram apply_mask(const ComplexMask &mask, const Spectrogram &spec);
Eigen::MatrixXcd apply_mask(const ComplexMask &mask,
                            const Eigen::MatrixXcd &plane);

// sigma^2(t,f) = max(|D(t,f)|^2, 1e-6 * mean(|D|^2)) from the dry-clean
// reference-channel spectrogram. An all-zero input yields a uniform
// machine-level floor and sets the degenerate flag.
SigmaPower oracle_sigma(const Eigen::MatrixXcd &dry_clean_ref);

// sigma^2 = |mask . Y_ref|^2 with the same flooring as oracle_sigma.
SigmaPower sigma_from_mask(const ComplexMask &mask_sigma,
                           const Eigen::MatrixXcd &mixture_ref);

}  // namespace tapbeam

#endif  // TAPBEAM_MASK_HPP_

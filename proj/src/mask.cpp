// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "mask.hpp"

#include <limits>

namespace tapbeam {

ComplexMask oracle_cirm(const Eigen::MatrixXcd &target,
                        const Eigen::MatrixXcd &mixture, MaskRole role) {
  require(target.rows() == mixture.rows() && target.cols() == mixture.cols(),
          ErrorKind::Data, "mask shapes do not match");
  const double mean_pow = mixture.squaredNorm() / std::max<Eigen::Index>(1, mixture.size());
  const double eps = kMaskEpsRel * mean_pow;

  ComplexMask mask;
  mask.role = role;
  mask.values.resize(target.rows(), target.cols());
  for (Eigen::Index c = 0; c < target.cols(); ++c) {
    for (Eigen::Index r = 0; r < target.rows(); ++r) {
      const std::complex<double> y = mixture(r, c);
      const std::complex<double> s = target(r, c);
      const double denom = std::norm(y) + eps;
      // (Yr.Sr + Yi.Si)/(|Y|^2+eps) + j (Yr.Si - Yi.Sr)/(|Y|^2+eps)
      mask.values(r, c) =
          denom > 0.0 ? std::conj(y) * s / denom : std::complex<double>(0, 0);
    }
  }
  return mask;
}

Eigen::MatrixXcd apply_mask(const ComplexMask &mask,
                            const Eigen::MatrixXcd &plane) {
  require(mask.values.rows() == plane.rows() && mask.values.cols() == plane.cols(),
          ErrorKind::Data, "mask does not match spectrogram shape");
  return mask.values.cwiseProduct(plane);
}

Spectrogram apply_mask(const ComplexMask &mask, const Spectrogram &spec) {
  Spectrogram out;
  out.config = spec.config;
  out.num_samples = spec.num_samples;
  out.channels.reserve(spec.channels.size());
  for (const auto &ch : spec.channels) out.channels.push_back(apply_mask(mask, ch));
  return out;
}

namespace {

SigmaPower floor_power(Eigen::MatrixXd power) {
  SigmaPower sigma;
  const double mean_pow = power.sum() / std::max<Eigen::Index>(1, power.size());
  if (mean_pow <= 0.0) {
    sigma.degenerate = true;
    sigma.values = Eigen::MatrixXd::Constant(
        power.rows(), power.cols(),
        kSigmaEpsRel * std::numeric_limits<double>::epsilon());
    return sigma;
  }
  const double floor = kSigmaEpsRel * mean_pow;
  sigma.values = power.cwiseMax(floor);
  return sigma;
}

}  // namespace

SigmaPower oracle_sigma(const Eigen::MatrixXcd &dry_clean_ref) {
  require(dry_clean_ref.size() > 0, ErrorKind::Data, "empty sigma input");
  return floor_power(dry_clean_ref.cwiseAbs2());
}

SigmaPower sigma_from_mask(const ComplexMask &mask_sigma,
                           const Eigen::MatrixXcd &mixture_ref) {
  require(mask_sigma.role == MaskRole::Sigma, ErrorKind::Config,
          "sigma_from_mask requires a Sigma-role mask");
  Eigen::MatrixXcd est = apply_mask(mask_sigma, mixture_ref);
  return floor_power(est.cwiseAbs2());
}

}  // namespace tapbeam

// Copyright 2025 the tapbeam authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "loss.hpp"

#include <cmath>

namespace tapbeam {

namespace {

constexpr double kClipDb = 60.0;
constexpr double kLn10 = 2.302585092994045684;

struct Projection {
  double alpha = 0.0;
  double signal_pow = 0.0;  // ||alpha s||^2
  double error_pow = 0.0;   // ||e||^2
};

Projection project(const Eigen::VectorXd &estimate,
                   const Eigen::VectorXd &target) {
  const double target_pow = target.squaredNorm();
  require(target_pow > 0.0, ErrorKind::Data, "SI-SNR target is all zero");
  Projection p;
  p.alpha = estimate.dot(target) / target_pow;
  p.signal_pow = p.alpha * p.alpha * target_pow;
  p.error_pow = (estimate - p.alpha * target).squaredNorm();
  return p;
}

LossValue snr_db(const Projection &p) {
  LossValue v;
  if (p.error_pow <= 0.0) {
    v.value = kClipDb;
    v.clipped = true;
  } else if (p.signal_pow <= 0.0) {
    v.value = -kClipDb;
    v.clipped = true;
  } else {
    v.value = 10.0 * std::log10(p.signal_pow / p.error_pow);
    if (v.value > kClipDb) {
      v.value = kClipDb;
      v.clipped = true;
    } else if (v.value < -kClipDb) {
      v.value = -kClipDb;
      v.clipped = true;
    }
  }
  return v;
}

Eigen::VectorXd snr_grad(const Eigen::VectorXd &estimate,
                         const Eigen::VectorXd &target) {
  const Projection p = project(estimate, target);
  const LossValue v = snr_db(p);
  if (v.clipped) return Eigen::VectorXd::Zero(estimate.size());
  const Eigen::VectorXd scaled = p.alpha * target;
  const Eigen::VectorXd err = estimate - scaled;
  // d/de 10 log10(||alpha s||^2 / ||e||^2); the error is orthogonal to s,
  // so the projector drops out of the error term.
  return (20.0 / kLn10) * (scaled / p.signal_pow - err / p.error_pow);
}

Eigen::VectorXd concat_real_imag(const Eigen::MatrixXcd &m) {
  const Eigen::Index n = m.size();
  Eigen::VectorXd out(2 * n);
  const std::complex<double> *data = m.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i) = data[i].real();
    out(n + i) = data[i].imag();
  }
  return out;
}

}  // namespace

LossValue si_snr(const Eigen::VectorXd &estimate,
                 const Eigen::VectorXd &target) {
  require(estimate.size() == target.size(), ErrorKind::Data,
          "SI-SNR length mismatch");
  return snr_db(project(estimate, target));
}

Eigen::VectorXd si_snr_grad(const Eigen::VectorXd &estimate,
                            const Eigen::VectorXd &target) {
  require(estimate.size() == target.size(), ErrorKind::Data,
          "SI-SNR length mismatch");
  return snr_grad(estimate, target);
}

LossValue c_si_snr(const Eigen::MatrixXcd &estimate,
                   const Eigen::MatrixXcd &target) {
  require(estimate.rows() == target.rows() && estimate.cols() == target.cols(),
          ErrorKind::Data, "C-SI-SNR shape mismatch");
  return si_snr(concat_real_imag(estimate), concat_real_imag(target));
}

Eigen::MatrixXcd c_si_snr_grad(const Eigen::MatrixXcd &estimate,
                               const Eigen::MatrixXcd &target) {
  require(estimate.rows() == target.rows() && estimate.cols() == target.cols(),
          ErrorKind::Data, "C-SI-SNR shape mismatch");
  const Eigen::VectorXd g =
      snr_grad(concat_real_imag(estimate), concat_real_imag(target));
  const Eigen::Index n = estimate.size();
  Eigen::MatrixXcd out(estimate.rows(), estimate.cols());
  std::complex<double> *data = out.data();
  for (Eigen::Index i = 0; i < n; ++i)
    data[i] = std::complex<double>(g(i), g(n + i));
  return out;
}

LossValue mag_mse(const Eigen::MatrixXd &estimate_mag,
                  const Eigen::MatrixXd &target_mag) {
  require(estimate_mag.rows() == target_mag.rows() &&
              estimate_mag.cols() == target_mag.cols(),
          ErrorKind::Data, "Mag-MSE shape mismatch");
  require((estimate_mag.array() >= 0.0).all() &&
              (target_mag.array() >= 0.0).all(),
          ErrorKind::Data, "magnitudes must be nonnegative");
  LossValue v;
  v.value = (estimate_mag - target_mag).squaredNorm();
  return v;
}

Eigen::MatrixXd mag_mse_grad(const Eigen::MatrixXd &estimate_mag,
                             const Eigen::MatrixXd &target_mag) {
  require(estimate_mag.rows() == target_mag.rows() &&
              estimate_mag.cols() == target_mag.cols(),
          ErrorKind::Data, "Mag-MSE shape mismatch");
  return 2.0 * (estimate_mag - target_mag);
}

LossValue mag_mse_complex(const Eigen::MatrixXcd &estimate,
                          const Eigen::MatrixXcd &target) {
  require(estimate.rows() == target.rows() && estimate.cols() == target.cols(),
          ErrorKind::Data, "Mag-MSE shape mismatch");
  LossValue v;
  v.value = (estimate - target).squaredNorm();
  return v;
}

LossValue combo_loss(const Eigen::MatrixXcd &estimate_spec,
                     const Eigen::VectorXd &estimate_wav,
                     const Eigen::MatrixXcd &dry_spec,
                     const Eigen::VectorXd &dry_wav, double gamma,
                     double beta) {
  LossValue mag = mag_mse(estimate_spec.cwiseAbs(), dry_spec.cwiseAbs());
  LossValue si = si_snr(estimate_wav, dry_wav);
  LossValue csi = c_si_snr(estimate_spec, dry_spec);

  LossValue v;
  v.has_components = true;
  v.mag_mse = mag.value;
  v.si_snr = si.value;
  v.c_si_snr = csi.value;
  v.clipped = si.clipped || csi.clipped;
  v.value = gamma * mag.value - beta * si.value - csi.value;
  return v;
}

ComboGradient combo_loss_grad(const Eigen::MatrixXcd &estimate_spec,
                              const Eigen::VectorXd &estimate_wav,
                              const Eigen::MatrixXcd &dry_spec,
                              const Eigen::VectorXd &dry_wav, double gamma,
                              double beta) {
  ComboGradient g;
  // magnitude chain: d|z| = z / |z| (left zero at |z| = 0, where the
  // magnitude is not differentiable)
  const Eigen::MatrixXd mag_grad =
      mag_mse_grad(estimate_spec.cwiseAbs(), dry_spec.cwiseAbs());
  Eigen::MatrixXcd mag_chain(estimate_spec.rows(), estimate_spec.cols());
  for (Eigen::Index c = 0; c < estimate_spec.cols(); ++c) {
    for (Eigen::Index r = 0; r < estimate_spec.rows(); ++r) {
      const std::complex<double> z = estimate_spec(r, c);
      const double a = std::abs(z);
      mag_chain(r, c) = a > 0.0 ? mag_grad(r, c) * z / a
                                : std::complex<double>(0.0, 0.0);
    }
  }
  g.spec = gamma * mag_chain - c_si_snr_grad(estimate_spec, dry_spec);
  g.wav = -beta * si_snr_grad(estimate_wav, dry_wav);
  return g;
}

}  // namespace tapbeam

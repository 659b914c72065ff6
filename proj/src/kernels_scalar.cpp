#include <algorithm>
#include <cmath>

#include "ptspectra/kernels.hpp"

namespace ptspectra::simd {

namespace {

void derivative_scalar(const LaneBlock& y, cplx v, cplx u,
                       const LaneEnergies& e, LaneBlock& k) {
  // Written out in real arithmetic: std::complex operator* carries the
  // Annex G inf/nan recovery path, which the vector variant does not.
  for (std::size_t l = 0; l < kLanes; ++l) {
    const double q_re = v.real() - e.re[l];
    const double q_im = v.imag() - e.im[l];
    const double qp_re = q_re * y.psi_re[l] - q_im * y.psi_im[l];
    const double qp_im = q_re * y.psi_im[l] + q_im * y.psi_re[l];
    k.psi_re[l] = u.real() * y.dpsi_re[l] - u.imag() * y.dpsi_im[l];
    k.psi_im[l] = u.real() * y.dpsi_im[l] + u.imag() * y.dpsi_re[l];
    k.dpsi_re[l] = u.real() * qp_re - u.imag() * qp_im;
    k.dpsi_im[l] = u.real() * qp_im + u.imag() * qp_re;
  }
}

void combine_scalar(const LaneBlock& y, const LaneBlock* k, const double* coef,
                    std::size_t count, double h, LaneBlock& out) {
  LaneBlock acc = y;
  for (std::size_t j = 0; j < count; ++j) {
    if (coef[j] == 0.0) continue;
    const double w = h * coef[j];
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc.psi_re[l] += w * k[j].psi_re[l];
      acc.psi_im[l] += w * k[j].psi_im[l];
      acc.dpsi_re[l] += w * k[j].dpsi_re[l];
      acc.dpsi_im[l] += w * k[j].dpsi_im[l];
    }
  }
  out = acc;
}

double modulus(double re, double im) { return std::sqrt(re * re + im * im); }

double error_norm_scalar(const LaneBlock& err, const LaneBlock& y0,
                         const LaneBlock& y1, double atol, double rtol) {
  double worst = 0.0;
  for (std::size_t l = 0; l < kLanes; ++l) {
    const double s_psi =
        atol + rtol * std::max(modulus(y0.psi_re[l], y0.psi_im[l]),
                               modulus(y1.psi_re[l], y1.psi_im[l]));
    const double s_dpsi =
        atol + rtol * std::max(modulus(y0.dpsi_re[l], y0.dpsi_im[l]),
                               modulus(y1.dpsi_re[l], y1.dpsi_im[l]));
    worst = std::max(worst, modulus(err.psi_re[l], err.psi_im[l]) / s_psi);
    worst =
        std::max(worst, modulus(err.dpsi_re[l], err.dpsi_im[l]) / s_dpsi);
  }
  return worst;
}

void rotate_scalar(cplx* x, cplx* y, std::size_t n, double c, cplx s) {
  const double sr = s.real();
  const double si = s.imag();
  for (std::size_t j = 0; j < n; ++j) {
    const double ar = x[j].real(), ai = x[j].imag();
    const double br = y[j].real(), bi = y[j].imag();
    x[j] = {c * ar + (sr * br - si * bi), c * ai + (sr * bi + si * br)};
    y[j] = {c * br - (sr * ar + si * ai), c * bi - (sr * ai - si * ar)};
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", derivative_scalar, combine_scalar,
                                 error_norm_scalar, rotate_scalar};
  return table;
}

}  // namespace ptspectra::simd

// Compiled with -mavx2 -mfma; only reached through avx2_kernels() after a
// runtime CPU check.
#include <immintrin.h>

#include "ptspectra/kernels.hpp"

namespace ptspectra::simd::avx2 {

namespace {

inline __m256d cmul_re(__m256d ar, __m256d ai, __m256d br, __m256d bi) {
  return _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi));
}
inline __m256d cmul_im(__m256d ar, __m256d ai, __m256d br, __m256d bi) {
  return _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br));
}

inline __m256d modulus(__m256d re, __m256d im) {
  return _mm256_sqrt_pd(_mm256_fmadd_pd(re, re, _mm256_mul_pd(im, im)));
}

void derivative(const LaneBlock& y, cplx v, cplx u, const LaneEnergies& e,
                LaneBlock& k) {
  const __m256d q_re = _mm256_sub_pd(_mm256_set1_pd(v.real()),
                                     _mm256_load_pd(e.re.data()));
  const __m256d q_im = _mm256_sub_pd(_mm256_set1_pd(v.imag()),
                                     _mm256_load_pd(e.im.data()));
  const __m256d ur = _mm256_set1_pd(u.real());
  const __m256d ui = _mm256_set1_pd(u.imag());
  const __m256d pr = _mm256_load_pd(y.psi_re.data());
  const __m256d pi = _mm256_load_pd(y.psi_im.data());
  const __m256d dr = _mm256_load_pd(y.dpsi_re.data());
  const __m256d di = _mm256_load_pd(y.dpsi_im.data());

  const __m256d qp_re = cmul_re(q_re, q_im, pr, pi);
  const __m256d qp_im = cmul_im(q_re, q_im, pr, pi);
  _mm256_store_pd(k.psi_re.data(), cmul_re(ur, ui, dr, di));
  _mm256_store_pd(k.psi_im.data(), cmul_im(ur, ui, dr, di));
  _mm256_store_pd(k.dpsi_re.data(), cmul_re(ur, ui, qp_re, qp_im));
  _mm256_store_pd(k.dpsi_im.data(), cmul_im(ur, ui, qp_re, qp_im));
}

void combine(const LaneBlock& y, const LaneBlock* k, const double* coef,
             std::size_t count, double h, LaneBlock& out) {
  __m256d pr = _mm256_load_pd(y.psi_re.data());
  __m256d pi = _mm256_load_pd(y.psi_im.data());
  __m256d dr = _mm256_load_pd(y.dpsi_re.data());
  __m256d di = _mm256_load_pd(y.dpsi_im.data());
  for (std::size_t j = 0; j < count; ++j) {
    if (coef[j] == 0.0) continue;
    const __m256d w = _mm256_set1_pd(h * coef[j]);
    pr = _mm256_fmadd_pd(w, _mm256_load_pd(k[j].psi_re.data()), pr);
    pi = _mm256_fmadd_pd(w, _mm256_load_pd(k[j].psi_im.data()), pi);
    dr = _mm256_fmadd_pd(w, _mm256_load_pd(k[j].dpsi_re.data()), dr);
    di = _mm256_fmadd_pd(w, _mm256_load_pd(k[j].dpsi_im.data()), di);
  }
  _mm256_store_pd(out.psi_re.data(), pr);
  _mm256_store_pd(out.psi_im.data(), pi);
  _mm256_store_pd(out.dpsi_re.data(), dr);
  _mm256_store_pd(out.dpsi_im.data(), di);
}

double error_norm(const LaneBlock& err, const LaneBlock& y0,
                  const LaneBlock& y1, double atol, double rtol) {
  const __m256d va = _mm256_set1_pd(atol);
  const __m256d vr = _mm256_set1_pd(rtol);

  const __m256d s_psi = _mm256_fmadd_pd(
      vr,
      _mm256_max_pd(modulus(_mm256_load_pd(y0.psi_re.data()),
                            _mm256_load_pd(y0.psi_im.data())),
                    modulus(_mm256_load_pd(y1.psi_re.data()),
                            _mm256_load_pd(y1.psi_im.data()))),
      va);
  const __m256d s_dpsi = _mm256_fmadd_pd(
      vr,
      _mm256_max_pd(modulus(_mm256_load_pd(y0.dpsi_re.data()),
                            _mm256_load_pd(y0.dpsi_im.data())),
                    modulus(_mm256_load_pd(y1.dpsi_re.data()),
                            _mm256_load_pd(y1.dpsi_im.data()))),
      va);
  const __m256d e_psi = _mm256_div_pd(modulus(_mm256_load_pd(err.psi_re.data()),
                                              _mm256_load_pd(err.psi_im.data())),
                                      s_psi);
  const __m256d e_dpsi =
      _mm256_div_pd(modulus(_mm256_load_pd(err.dpsi_re.data()),
                            _mm256_load_pd(err.dpsi_im.data())),
                    s_dpsi);
  const __m256d m = _mm256_max_pd(e_psi, e_dpsi);
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, m);
  double worst = lanes[0];
  for (std::size_t l = 1; l < kLanes; ++l) worst = lanes[l] > worst ? lanes[l] : worst;
  return worst;
}

// Interleaved complex rows, two elements per register.
//   s·b = addsub(s_re·b, s_im·swap(b)),  swap(b) = (b_im, b_re)
void rotate(cplx* x, cplx* y, std::size_t n, double c, cplx s) {
  auto* xd = reinterpret_cast<double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d sr = _mm256_set1_pd(s.real());
  const __m256d si = _mm256_set1_pd(s.imag());
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * j);
    const __m256d b = _mm256_loadu_pd(yd + 2 * j);
    const __m256d a_sw = _mm256_permute_pd(a, 0b0101);
    const __m256d b_sw = _mm256_permute_pd(b, 0b0101);
    const __m256d sb = _mm256_addsub_pd(_mm256_mul_pd(sr, b), _mm256_mul_pd(si, b_sw));
    // conj(s)·a, assembled as (im, re) and swapped back
    const __m256d sca = _mm256_permute_pd(
        _mm256_addsub_pd(_mm256_mul_pd(sr, a_sw), _mm256_mul_pd(si, a)), 0b0101);
    _mm256_storeu_pd(xd + 2 * j, _mm256_fmadd_pd(vc, a, sb));
    _mm256_storeu_pd(yd + 2 * j, _mm256_fmsub_pd(vc, b, sca));
  }
  const double s_re = s.real(), s_im = s.imag();
  for (; j < n; ++j) {
    const double ar = x[j].real(), ai = x[j].imag();
    const double br = y[j].real(), bi = y[j].imag();
    x[j] = {c * ar + (s_re * br - s_im * bi), c * ai + (s_re * bi + s_im * br)};
    y[j] = {c * br - (s_re * ar + s_im * ai), c * bi - (s_re * ai - s_im * ar)};
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2", derivative, combine, error_norm, rotate};
  return t;
}

}  // namespace ptspectra::simd::avx2

#include "ptspectra/eig.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "ptspectra/error.hpp"
#include "ptspectra/kernels.hpp"

namespace ptspectra {

namespace {

using cplx = std::complex<double>;

double cabs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Diagonal similarity by powers of two so that row and column norms of each
// index are comparable.
void balance(ComplexMatrix& a) {
  const std::size_t n = a.size();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += cabs1(a(j, i));
        r += cabs1(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c >= g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        for (std::size_t j = 0; j < n; ++j) {
          a(i, j) /= f;
          a(j, i) *= f;
        }
      }
    }
  }
}

void to_hessenberg(ComplexMatrix& a) {
  const std::size_t n = a.size();
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha = std::hypot(alpha, std::abs(a(i, k)));
    if (alpha == 0.0) continue;
    const cplx x0 = a(k + 1, k);
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx(1.0, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) v[i] = a(i, k);
    v[k + 1] += phase * alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    const double tau = 2.0 / vnorm2;

    for (std::size_t j = k; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      s *= tau;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    a(k + 1, k) = -phase * alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

struct Givens {
  double c;
  cplx s;
  cplx r;
};

// [c s; −conj(s) c]·[x; y] = [r; 0]
Givens make_givens(cplx x, cplx y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, 0.0, x};
  if (ax == 0.0) return {0.0, std::conj(y) / ay, ay};
  const double norm = std::hypot(ax, ay);
  const cplx phase = x / ax;
  return {ax / norm, phase * std::conj(y) / norm, phase * norm};
}

// Wilkinson-style shift from the trailing 2×2 block of the active window.
cplx trailing_shift(const ComplexMatrix& h, std::size_t i) {
  cplx t = h(i, i);
  const cplx u = std::sqrt(h(i - 1, i)) * std::sqrt(h(i, i - 1));
  double s = cabs1(u);
  if (s == 0.0) return t;
  const cplx x = 0.5 * (h(i - 1, i - 1) - t);
  const double sx = cabs1(x);
  s = std::max(s, sx);
  cplx y = s * std::sqrt((x / s) * (x / s) + (u / s) * (u / s));
  if (sx > 0.0 && ((x / sx).real() * y.real() + (x / sx).imag() * y.imag()) < 0.0) y = -y;
  return t - u * (u / (x + y));
}

std::vector<cplx> hessenberg_qr(ComplexMatrix& h, const std::string& source) {
  const std::size_t n = h.size();
  std::vector<cplx> eig(n);
  const double ulp = DBL_EPSILON;
  const double smlnum = DBL_MIN * (static_cast<double>(n) / ulp);
  const std::size_t budget = 30 * n;
  const simd::KernelTable& kt = simd::active_kernels();
  std::size_t total = 0;

  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1;
  while (i >= 0) {
    int its = 0;
    for (;;) {
      std::ptrdiff_t l = i;
      for (; l > 0; --l) {
        const cplx sub = h(l, l - 1);
        if (cabs1(sub) <= smlnum) break;
        double tst = cabs1(h(l - 1, l - 1)) + cabs1(h(l, l));
        if (tst == 0.0) {
          if (l - 2 >= 0) tst += std::abs(h(l - 1, l - 2).real());
          if (l + 1 <= i) tst += std::abs(h(l + 1, l).real());
        }
        if (cabs1(sub) <= ulp * tst) break;
      }
      if (l > 0) h(l, l - 1) = 0.0;
      if (l >= i) {
        eig[i] = h(i, i);
        --i;
        break;
      }
      if (++total > budget)
        throw ConvergenceError("eigenvalues: QR iteration did not converge within " +
                               std::to_string(budget) + " sweeps for " + source);
      ++its;

      cplx shift;
      if (its == 10)
        shift = 0.75 * std::abs(h(l + 1, l).real()) + h(l, l);
      else if (its == 20)
        shift = 0.75 * std::abs(h(i, i - 1).real()) + h(i, i);
      else
        shift = trailing_shift(h, static_cast<std::size_t>(i));

      const auto lo = static_cast<std::size_t>(l);
      const auto hi = static_cast<std::size_t>(i);
      for (std::size_t k = lo; k < hi; ++k) {
        Givens g;
        if (k == lo) {
          g = make_givens(h(k, k) - shift, h(k + 1, k));
        } else {
          g = make_givens(h(k, k - 1), h(k + 1, k - 1));
          h(k, k - 1) = g.r;
          h(k + 1, k - 1) = 0.0;
        }
        kt.rotate(h.row(k) + k, h.row(k + 1) + k, hi - k + 1, g.c, g.s);
        const std::size_t last = std::min(k + 2, hi);
        const cplx sc = std::conj(g.s);
        for (std::size_t r = lo; r <= last; ++r) {
          const cplx a = h(r, k);
          const cplx b = h(r, k + 1);
          h(r, k) = g.c * a + sc * b;
          h(r, k + 1) = g.c * b - g.s * a;
        }
      }
    }
  }
  return eig;
}

}  // namespace

SpectrumSet eigenvalues(const ComplexMatrix& a, const std::string& source) {
  const std::size_t n = a.size();
  if (n == 0) throw DomainError("eigenvalues: empty matrix (" + source + ")");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (!std::isfinite(a(r, c).real()) || !std::isfinite(a(r, c).imag()))
        throw DomainError("eigenvalues: non-finite entry in " + source);

  ComplexMatrix h = a;
  balance(h);
  to_hessenberg(h);
  SpectrumSet s;
  s.values = hessenberg_qr(h, source);
  s.source = source;
  std::sort(s.values.begin(), s.values.end(), [](cplx x, cplx y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  });
  return s;
}

PairAudit conjugate_pair_audit(const SpectrumSet& s) {
  PairAudit audit;
  const auto& v = s.values;
  std::vector<bool> used(v.size(), false);
  auto is_real = [](cplx z) { return std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z.real())); };
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (used[i]) continue;
    if (is_real(v[i])) {
      used[i] = true;
      ++audit.real_count;
      continue;
    }
    const double tol = 1e-8 * (1.0 + std::abs(v[i]));
    std::size_t best = v.size();
    double best_dist = tol;
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (used[j] || is_real(v[j])) continue;
      const double d = std::abs(v[i] - std::conj(v[j]));
      if (d <= best_dist) {
        best = j;
        best_dist = d;
      }
    }
    used[i] = true;
    if (best < v.size()) {
      used[best] = true;
      ++audit.pair_count;
    } else {
      audit.unpaired.push_back(v[i]);
    }
  }
  return audit;
}

}  // namespace ptspectra

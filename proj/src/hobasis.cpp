#include "ptspectra/hobasis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

// X^{j+1} = X^j · X with X tridiagonal: only columns c−1 and c+1 contribute.
RealMatrix times_position(const RealMatrix& m) {
  const std::size_t w = m.size();
  RealMatrix out(w);
  for (std::size_t r = 0; r < w; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double acc = 0.0;
      if (c > 0) acc += m(r, c - 1) * std::sqrt(static_cast<double>(c) / 2.0);
      if (c + 1 < w) acc += m(r, c + 1) * std::sqrt(static_cast<double>(c + 1) / 2.0);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace

RealMatrix position_power_matrix(int k, std::size_t n) {
  if (k < 0 || k > kMaxPositionPower)
    throw DomainError("position_power_matrix: unsupported order k = " + std::to_string(k));
  if (n == 0) throw DomainError("position_power_matrix: N must be >= 1");
  const std::size_t w = n + static_cast<std::size_t>(k);
  RealMatrix m(w);
  for (std::size_t i = 0; i < w; ++i) m(i, i) = 1.0;
  for (int j = 0; j < k; ++j) m = times_position(m);
  RealMatrix out = m.block(n);
  // x^k is symmetric; mirror so rounding cannot break that.
  for (std::size_t r = 1; r < n; ++r)
    for (std::size_t c = 0; c < r; ++c) out(r, c) = out(c, r);
  return out;
}

RealMatrix momentum_squared_matrix(std::size_t n) {
  if (n == 0) throw DomainError("momentum_squared_matrix: N must be >= 1");
  RealMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = static_cast<double>(i) + 0.5;
    if (i + 2 < n) {
      const double v = -0.5 * std::sqrt(static_cast<double>((i + 1) * (i + 2)));
      m(i, i + 2) = v;
      m(i + 2, i) = v;
    }
  }
  return m;
}

bool supported_basis_epsilon(int epsilon) {
  return epsilon == 0 || epsilon == 1 || epsilon == 2 || epsilon == 4 || epsilon == 6;
}

TruncatedHamiltonian build_truncation(int epsilon, std::size_t n) {
  if (!supported_basis_epsilon(epsilon))
    throw DomainError("oscillator-basis truncation supports only epsilon in {0,1,2,4,6}; "
                      "non-integer or other orders are not expanded (got " +
                      std::to_string(epsilon) + ")");
  const RealMatrix p2 = momentum_squared_matrix(n);
  const RealMatrix xk = position_power_matrix(epsilon + 2, n);
  static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> phase = kIPow[epsilon % 4];

  TruncatedHamiltonian h;
  h.n = n;
  h.epsilon = epsilon;
  h.entries = ComplexMatrix(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) h.entries(r, c) = p2(r, c) + phase * xk(r, c);
  return h;
}

bool pt_signature_check(const ComplexMatrix& h) {
  const std::size_t n = h.size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
      if (std::abs(sign * std::conj(h(r, c)) - h(r, c)) > 1e-14) return false;
    }
  }
  return true;
}

double hermiticity_defect(const ComplexMatrix& h) {
  double worst = 0.0;
  for (std::size_t r = 0; r < h.size(); ++r)
    for (std::size_t c = 0; c < h.size(); ++c)
      worst = std::max(worst, std::abs(h(r, c) - std::conj(h(c, r))));
  return worst;
}

}  // namespace ptspectra

#pragma once
// Matrix elements of H = p² + i^ε x^{ε+2} in the harmonic-oscillator basis
// |n⟩ of p² + x² (eigenvalues 2n+1), with a = (x + ip)/√2.

#include <cstddef>

#include "ptspectra/matrix.hpp"

namespace ptspectra {

inline constexpr int kMaxPositionPower = 12;

/// Exact N×N block of ⟨m|x^k|n⟩: products are formed at working size N+k
/// and truncated afterwards. Throws DomainError for k > 12 or N == 0.
RealMatrix position_power_matrix(int k, std::size_t n);

/// Exact N×N block of ⟨m|p²|n⟩.
RealMatrix momentum_squared_matrix(std::size_t n);

struct TruncatedHamiltonian {
  std::size_t n = 0;
  int epsilon = 0;
  ComplexMatrix entries;
};

/// The deformations the oscillator expansion supports.
bool supported_basis_epsilon(int epsilon);

/// entries = P² + i^ε·X^{ε+2}. Throws DomainError unless ε ∈ {0, 1, 2, 4, 6}.
TruncatedHamiltonian build_truncation(int epsilon, std::size_t n);

/// S·conj(H)·S == H elementwise within 1e-14, S = diag((−1)^n).
bool pt_signature_check(const ComplexMatrix& h);
inline bool pt_signature_check(const TruncatedHamiltonian& h) {
  return pt_signature_check(h.entries);
}

/// max |H − H†| over entries.
double hermiticity_defect(const ComplexMatrix& h);

}  // namespace ptspectra

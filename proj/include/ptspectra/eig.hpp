#pragma once
// Eigenvalues of dense complex non-Hermitian matrices: balancing, Householder
// reduction to Hessenberg form and single-shift complex QR with deflation.

#include <complex>
#include <string>
#include <vector>

#include "ptspectra/matrix.hpp"

namespace ptspectra {

struct SpectrumSet {
  std::vector<std::complex<double>> values;  // sorted by (Re, Im)
  std::string source;                        // e.g. "truncation eps=1 N=40"
};

/// All N eigenvalues. Throws ConvergenceError naming `source` if the QR
/// iteration needs more than 30·N sweeps. Throws DomainError for empty or
/// non-finite input.
SpectrumSet eigenvalues(const ComplexMatrix& a, const std::string& source = "matrix");

struct PairAudit {
  std::size_t real_count = 0;
  std::size_t pair_count = 0;
  std::vector<std::complex<double>> unpaired;
};

/// Greedy conjugate matching. A value is real when |Im| ≤ 1e-8·(1+|Re|);
/// two non-real values pair when |a − conj(b)| ≤ 1e-8·(1+|a|).
PairAudit conjugate_pair_audit(const SpectrumSet& s);

}  // namespace ptspectra

#pragma once
// Diagnostics for the oscillator-basis truncation: how low-lying truncation
// eigenvalues settle with N, how many can be trusted, power-law growth of
// the levels, and a level-by-level comparison against shooting.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptspectra/eig.hpp"
#include "ptspectra/shooting.hpp"

namespace ptspectra {

/// The k eigenvalues of smallest modulus, ordered by (|E|, Im E). Ordering by
/// modulus keeps the large-|Im E| conjugate pairs of a truncation out of
/// the low-lying levels.
std::vector<cplx> lowest_lying(const SpectrumSet& s, std::size_t k);

struct StabilizationTrace {
  int epsilon = 0;
  std::size_t k = 0;
  std::vector<std::size_t> n_values;      // strictly ascending
  std::vector<std::vector<cplx>> levels;  // levels[row][level], k per row
};

/// Throws DomainError when n_values is empty or not strictly ascending, or
/// k > min(n_values). Truncations are diagonalized in parallel.
StabilizationTrace stabilization_trace(int epsilon, std::span<const std::size_t> n_values,
                                       std::size_t k);

/// Largest m such that levels 0..m−1 moved by less than tol (relative) over
/// each of the last two N increments and are real at the largest N.
/// Throws DomainError for traces with fewer than three rows.
std::size_t settled_count(const StabilizationTrace& trace, double tol);

struct Level {
  int n = 0;
  double energy = 0.0;
};

struct GrowthFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of ln E_n against ln(n + 1/2) over n_from ≤ n ≤ n_to.
/// Requires n_to − n_from ≥ 5 and E_n > 0 for every level in the window.
GrowthFit wkb_growth_fit(std::span<const Level> levels, int n_from, int n_to);

enum class Verdict { converged, artifact };

struct CompareOptions {
  double settle_tolerance = 1e-3;
  StepControl step = StepControl::adaptive();
  double decay_target = kDefaultDecayTarget;
};

struct ComparisonReport {
  int epsilon = 0;
  std::size_t n_max = 0;
  double settle_tolerance = 0.0;
  std::vector<cplx> shooting;    // lowest levels, branch 0
  std::vector<cplx> truncation;  // lowest-lying at n_max
  std::vector<double> abs_deviation;
  std::vector<double> rel_deviation;
  std::vector<Verdict> verdicts;
  std::size_t settled_count = 0;
  bool basis_valid = true;
  std::string note;
  StabilizationTrace trace;
};

/// N values used by compare_methods: n_max, n_max − Δ, ... down to the
/// level count, Δ = max(1, n_max/10), ascending.
std::vector<std::size_t> default_n_ladder(std::size_t n_max, std::size_t levels);

/// Shooting (branch 0) against truncation at n_max. A truncation level is
/// converged when it lies within 10·settle_tolerance (relative) of some
/// shooting eigenvalue. For ε ∈ {2, 4, 6} basis_valid is false: the
/// oscillator basis only spans solutions decaying on the real axis, which
/// those wedge pairs do not contain.
ComparisonReport compare_methods(int epsilon, std::size_t levels, std::size_t n_max,
                                 const CompareOptions& options = {});

std::string_view to_string(Verdict v);

}  // namespace ptspectra

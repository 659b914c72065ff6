#pragma once
// Eigenvalues of −ψ″ + x²(ix)^ε ψ = Eψ by two-sided shooting: decaying WKB
// seeds at both contour endpoints are integrated to the matching vertex and the
// normalized Wronskian W(E) is driven to zero.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ptspectra/ode.hpp"
#include "ptspectra/wedges.hpp"

namespace ptspectra {

/// Reality threshold shared by shooting and truncation spectra.
inline bool classified_real(cplx e) {
  return std::abs(e.imag()) <= 1e-8 * (1.0 + std::abs(e.real()));
}

inline constexpr double kResidualAcceptance = 1e-9;

struct ProblemSpec {
  double epsilon = 0.0;
  int branch = 0;
  StepControl step = StepControl::adaptive();
  double decay_target = kDefaultDecayTarget;
  double e_min = 0.0;
  double e_max = 12.0;
  /// 0 selects max(161, width/0.05 + 1) points.
  std::size_t grid = 0;

  /// Throws DomainError on epsilon < 0, e_min ≥ e_max, grid == 1, bad step control.
  void validate() const;
  std::size_t grid_points() const;
  WedgePair wedges() const { return wedge_geometry(epsilon, branch); }
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct ShootingResult {
  cplx energy;
  cplx residual;  // normalized Wronskian at the matching point
  int iterations = 0;
  bool classified_real = false;
  Bracket bracket;
  double contour_radius = 0.0;
  std::vector<cplx> history;  // secant iterates
};

struct SpuriousBracket {
  Bracket bracket;
  std::string reason;
};

struct SpectrumReport {
  std::vector<ShootingResult> eigenvalues;  // ascending Re E
  std::vector<SpuriousBracket> spurious;
};

/// W(E) on an explicit contour.
cplx matching_residual(const ProblemSpec& spec, const Contour& contour, cplx energy);

/// W(E) on the contour planned for energy_hint = |E|.
cplx matching_residual(const ProblemSpec& spec, cplx energy);

/// W on the uniform real grid of spec, all points sharing one contour.
/// Evaluated kLanes energies at a time.
std::vector<cplx> residual_grid(const ProblemSpec& spec, const Contour& contour);

/// Candidate brackets: a phase jump of more than π/2 between neighbours, or
/// a local minimum of |W| below 0.1. Overlapping candidates are merged.
/// When the matching point moves with E the grid is split into sub-windows,
/// each with its own contour; neighbouring sub-windows share their boundary
/// grid point and comparisons never cross a sub-window.
std::vector<Bracket> scan(const ProblemSpec& spec);

/// Complex secant from the bracket endpoints. Throws ConvergenceError when
/// the iteration fails or lands outside the widened bracket.
ShootingResult refine(const ProblemSpec& spec, const Bracket& bracket);

/// scan + refine + dedupe over the spec window.
SpectrumReport spectrum(const ProblemSpec& spec);

/// At least `count` eigenvalues starting from spec.e_min: the window
/// [e_min, e_max] is extended in doubling chunks, each scanned on its own
/// contour. Returns the lowest `count`.
SpectrumReport lowest_levels(const ProblemSpec& spec, std::size_t count);

}  // namespace ptspectra

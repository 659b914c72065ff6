#pragma once
// Integration of −ψ″ + x²(ix)^ε ψ = Eψ along piecewise-linear complex paths.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>

#include "ptspectra/error.hpp"
#include "ptspectra/kernels.hpp"

namespace ptspectra {

using cplx = std::complex<double>;

/// (ψ, ψ′) at x. The true solution value is exp(log_scale)·psi (likewise
/// for dpsi); integration rescales to keep |psi|, |dpsi| representable.
struct WaveState {
  cplx x{};
  cplx psi{1.0, 0.0};
  cplx dpsi{};
  double log_scale = 0.0;

  /// max(|psi|, |dpsi|)
  double magnitude() const;
};

enum class StepMode { fixed, adaptive };

struct StepControl {
  StepMode mode = StepMode::adaptive;
  double step = 1e-3;  // fixed mode
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_steps = 1'000'000;

  static StepControl fixed(double h) {
    StepControl c;
    c.mode = StepMode::fixed;
    c.step = h;
    return c;
  }
  static StepControl adaptive(double rel_tol = 1e-10, double abs_tol = 1e-12) {
    StepControl c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    return c;
  }

  /// Throws DomainError on nonpositive step/tolerances or max_steps == 0.
  void validate() const;
  std::string describe() const;
};

/// Step budget exhausted; carries the state reached so far.
class IntegrationError : public ConvergenceError {
 public:
  IntegrationError(const std::string& what, WaveState partial)
      : ConvergenceError(what), partial_(partial) {}
  const WaveState& partial() const { return partial_; }

 private:
  WaveState partial_;
};

/// x²(ix)^ε on the principal branch of the power. Integer ε is evaluated
/// as i^ε·x^{ε+2}.
cplx potential(cplx x, double epsilon);

/// Contours of branch-0 pairs stay clear of the principal-branch cut only
/// for ε ≤ 4.
inline bool outside_validated_branch_range(double epsilon) { return epsilon > 4.0; }

struct Derivative {
  cplx dpsi;
  cplx ddpsi;
};

/// First-order form: (ψ, ψ′)′ = (ψ′, (V − E)ψ).
Derivative rhs(const WaveState& state, cplx energy, double epsilon);

/// Seed for the solution that decays outward at x0: psi = 1,
/// dpsi = ∓√(V(x0) − E), sign picked so the solution grows along the
/// inward direction. Throws DomainError when |V(x0)| ≤ |E|.
WaveState wkb_seed(cplx x0, cplx energy, double epsilon, cplx inward_direction);

/// Integrates from seed.x through every vertex of path (path[0] == seed.x)
/// and returns the state at the last vertex. Fixed mode: classical RK4 with
/// the step shrunk to divide each segment evenly. Adaptive mode:
/// Dormand–Prince 5(4) with the mixed abs/rel error norm.
WaveState integrate(const WaveState& seed, std::span<const cplx> path,
                    cplx energy, double epsilon, const StepControl& ctl);

/// kLanes solutions on a common path, one energy per lane. Adaptive steps
/// are shared: a step is accepted when every lane passes.
struct BatchState {
  cplx x{};
  simd::LaneBlock y;
  std::array<double, simd::kLanes> log_scale{};
};

BatchState integrate_batch(const BatchState& seed, std::span<const cplx> path,
                           const simd::LaneEnergies& energies, double epsilon,
                           const StepControl& ctl,
                           const simd::KernelTable& kernels = simd::active_kernels());

/// Unscaled Wronskian ψ₁ψ₂′ − ψ₁′ψ₂ of the stored values (log scales not
/// applied) divided by the product of the two magnitudes.
cplx normalized_wronskian(const WaveState& a, const WaveState& b);

}  // namespace ptspectra

#include "ptspectra/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

#include "ptspectra/error.hpp"
#include "ptspectra/parallel.hpp"

namespace ptspectra {

namespace {

constexpr double kAutoSpacing = 0.05;
constexpr std::size_t kMinAutoGrid = 161;
constexpr double kLocalMinThreshold = 0.1;
constexpr int kMaxSecantIterations = 60;
constexpr double kDedupeTolerance = 1e-8;
constexpr int kMaxChunks = 16;

struct Arms {
  std::vector<cplx> left;   // left endpoint → match point
  std::vector<cplx> right;  // right endpoint → match point
};

Arms split_arms(const Contour& c) {
  Arms a;
  a.left.assign(c.vertices.begin(),
                c.vertices.begin() + static_cast<std::ptrdiff_t>(c.match_index) + 1);
  a.right.assign(c.vertices.rbegin(),
                 c.vertices.rend() - static_cast<std::ptrdiff_t>(c.match_index));
  return a;
}

cplx inward(const std::vector<cplx>& arm) {
  const cplx d = arm[1] - arm[0];
  return d / std::abs(d);
}

double window_tolerance(double e) { return kDedupeTolerance * (1.0 + std::abs(e)); }

}  // namespace

void ProblemSpec::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw DomainError("epsilon must be finite and >= 0");
  if (!(e_min < e_max)) throw DomainError("energy window requires e_min < e_max");
  if (grid == 1) throw DomainError("grid size must be >= 2");
  if (!(decay_target > 0.0)) throw DomainError("decay_target must be > 0");
  step.validate();
}

std::size_t ProblemSpec::grid_points() const {
  if (grid != 0) return grid;
  const auto n = static_cast<std::size_t>(std::ceil((e_max - e_min) / kAutoSpacing)) + 1;
  return std::max(kMinAutoGrid, n);
}

cplx matching_residual(const ProblemSpec& spec, const Contour& contour, cplx energy) {
  const Arms arms = split_arms(contour);
  const WaveState left = integrate(
      wkb_seed(arms.left.front(), energy, spec.epsilon, inward(arms.left)),
      arms.left, energy, spec.epsilon, spec.step);
  const WaveState right = integrate(
      wkb_seed(arms.right.front(), energy, spec.epsilon, inward(arms.right)),
      arms.right, energy, spec.epsilon, spec.step);
  return normalized_wronskian(left, right);
}

cplx matching_residual(const ProblemSpec& spec, cplx energy) {
  const Contour c = plan_contour(spec.wedges(), std::abs(energy), spec.decay_target);
  return matching_residual(spec, c, energy);
}

namespace {

std::vector<cplx> residuals_at(const ProblemSpec& spec, const Contour& contour,
                               std::span<const double> energies) {
  const std::size_t n = energies.size();
  const Arms arms = split_arms(contour);
  const std::size_t batches = (n + simd::kLanes - 1) / simd::kLanes;
  std::vector<cplx> w(n);

  parallel_for(batches, [&](std::size_t b) {
    simd::LaneEnergies e;
    for (std::size_t l = 0; l < simd::kLanes; ++l) {
      // Tail lanes repeat the last energy.
      e.re[l] = energies[std::min(b * simd::kLanes + l, n - 1)];
      e.im[l] = 0.0;
    }
    auto seed_arm = [&](const std::vector<cplx>& arm) {
      BatchState s;
      s.x = arm.front();
      for (std::size_t l = 0; l < simd::kLanes; ++l) {
        const WaveState ws =
            wkb_seed(arm.front(), cplx(e.re[l], e.im[l]), spec.epsilon, inward(arm));
        s.y.set(l, ws.psi, ws.dpsi);
      }
      return integrate_batch(s, arm, e, spec.epsilon, spec.step);
    };
    const BatchState left = seed_arm(arms.left);
    const BatchState right = seed_arm(arms.right);
    for (std::size_t l = 0; l < simd::kLanes; ++l) {
      const std::size_t k = b * simd::kLanes + l;
      if (k >= n) break;
      WaveState a, c;
      a.psi = left.y.psi(l);
      a.dpsi = left.y.dpsi(l);
      c.psi = right.y.psi(l);
      c.dpsi = right.y.dpsi(l);
      w[k] = normalized_wronskian(a, c);
    }
  });
  return w;
}

std::vector<double> grid_energies(const ProblemSpec& spec) {
  const std::size_t n = spec.grid_points();
  const double de = (spec.e_max - spec.e_min) / static_cast<double>(n - 1);
  std::vector<double> e(n);
  for (std::size_t k = 0; k < n; ++k) e[k] = spec.e_min + de * static_cast<double>(k);
  e.back() = spec.e_max;
  return e;
}

// Largest energy step over which the matching point may stay fixed: the
// shift of the match vertex times the local wavenumber stays below 2.
double subwindow_width(const ProblemSpec& spec, double e) {
  const double scale = std::max(std::abs(e), 1.0);
  const double drift = std::abs(matching_point(spec.epsilon, spec.branch, scale).imag()) /
                       ((spec.epsilon + 2.0) * scale);
  if (drift == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / (drift * std::sqrt(scale));
}

}  // namespace

std::vector<cplx> residual_grid(const ProblemSpec& spec, const Contour& contour) {
  const std::vector<double> e = grid_energies(spec);
  return residuals_at(spec, contour, e);
}

std::vector<Bracket> scan(const ProblemSpec& spec) {
  spec.validate();
  const double width = spec.e_max - spec.e_min;
  if (width <= window_tolerance(std::max(std::abs(spec.e_min), std::abs(spec.e_max))))
    return {};

  const std::vector<double> e = grid_energies(spec);
  const std::size_t n = e.size();
  const WedgePair wedges = spec.wedges();

  std::vector<Bracket> candidates;
  std::size_t lo = 0;
  while (lo + 1 < n) {
    std::size_t hi = lo + 1;
    const double limit = e[lo] + subwindow_width(spec, std::max(std::abs(e[lo]), std::abs(e[lo + 1])));
    while (hi + 1 < n && e[hi + 1] <= limit) ++hi;
    const std::span<const double> sub(e.data() + lo, hi - lo + 1);
    const double hint = std::max(std::abs(sub.front()), std::abs(sub.back()));
    const Contour contour = plan_contour(wedges, hint, spec.decay_target);
    const std::vector<cplx> w = residuals_at(spec, contour, sub);

    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
      if ((w[k] * std::conj(w[k + 1])).real() < 0.0)
        candidates.push_back({sub[k], sub[k + 1]});
    }
    for (std::size_t k = 1; k + 1 < w.size(); ++k) {
      const double m = std::abs(w[k]);
      if (m < kLocalMinThreshold && m < std::abs(w[k - 1]) && m <= std::abs(w[k + 1]))
        candidates.push_back({sub[k - 1], sub[k + 1]});
    }
    lo = hi;
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Bracket& a, const Bracket& b) { return a.lo < b.lo; });

  std::vector<Bracket> merged;
  for (const Bracket& b : candidates) {
    if (!merged.empty() && b.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, b.hi);
    else
      merged.push_back(b);
  }
  return merged;
}

ShootingResult refine(const ProblemSpec& spec, const Bracket& bracket) {
  const double mid = 0.5 * (bracket.lo + bracket.hi);
  const Contour contour = plan_contour(spec.wedges(), mid, spec.decay_target);

  ShootingResult r;
  r.bracket = bracket;
  r.contour_radius = contour.right_radius;

  cplx e0 = bracket.lo, e1 = bracket.hi;
  cplx w0 = matching_residual(spec, contour, e0);
  cplx w1 = matching_residual(spec, contour, e1);
  r.history = {e0, e1};

  bool converged = false;
  for (int it = 1; it <= kMaxSecantIterations; ++it) {
    const cplx dw = w1 - w0;
    if (dw == cplx(0.0, 0.0)) break;
    const cplx e2 = e1 - w1 * (e1 - e0) / dw;
    if (!std::isfinite(e2.real()) || !std::isfinite(e2.imag())) break;
    const cplx w2 = matching_residual(spec, contour, e2);
    r.history.push_back(e2);
    r.iterations = it;
    const bool small_step = std::abs(e2 - e1) <= 1e-12 * (1.0 + std::abs(e2));
    e0 = e1;
    w0 = w1;
    e1 = e2;
    w1 = w2;
    if (small_step || std::abs(w2) <= 1e-12) {
      converged = true;
      break;
    }
  }

  std::ostringstream why;
  const double width = bracket.hi - bracket.lo;
  if (!converged) {
    why << "secant did not converge in " << kMaxSecantIterations << " iterations";
  } else if (e1.real() < bracket.lo - width || e1.real() > bracket.hi + width) {
    why << "secant left the bracket (E = " << e1.real() << ")";
  } else if (std::abs(w1) > kResidualAcceptance) {
    why << "residual " << std::abs(w1) << " above acceptance threshold";
  }
  if (!why.str().empty())
    throw ConvergenceError("refine [" + std::to_string(bracket.lo) + ", " +
                           std::to_string(bracket.hi) + "]: " + why.str());

  r.energy = e1;
  r.residual = w1;
  r.classified_real = classified_real(e1);
  return r;
}

namespace {

void dedupe_sorted(std::vector<ShootingResult>& v) {
  std::sort(v.begin(), v.end(), [](const ShootingResult& a, const ShootingResult& b) {
    return a.energy.real() < b.energy.real() ||
           (a.energy.real() == b.energy.real() && a.energy.imag() < b.energy.imag());
  });
  std::vector<ShootingResult> out;
  for (auto& r : v) {
    if (!out.empty() &&
        std::abs(r.energy - out.back().energy) <= window_tolerance(std::abs(r.energy))) {
      if (std::abs(r.residual) < std::abs(out.back().residual)) out.back() = std::move(r);
      continue;
    }
    out.push_back(std::move(r));
  }
  v = std::move(out);
}

}  // namespace

SpectrumReport spectrum(const ProblemSpec& spec) {
  const std::vector<Bracket> brackets = scan(spec);
  std::vector<ShootingResult> found(brackets.size());
  std::vector<std::string> failure(brackets.size());

  parallel_for(brackets.size(), [&](std::size_t i) {
    try {
      found[i] = refine(spec, brackets[i]);
    } catch (const ConvergenceError& e) {
      failure[i] = e.what();
    } catch (const DomainError& e) {
      failure[i] = e.what();
    }
  });

  SpectrumReport report;
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    if (!failure[i].empty()) {
      report.spurious.push_back({brackets[i], failure[i]});
      continue;
    }
    const double re = found[i].energy.real();
    if (re < spec.e_min - window_tolerance(spec.e_min) ||
        re > spec.e_max + window_tolerance(spec.e_max)) {
      report.spurious.push_back(
          {brackets[i], "converged outside the window (E = " + std::to_string(re) + ")"});
      continue;
    }
    report.eigenvalues.push_back(std::move(found[i]));
  }
  dedupe_sorted(report.eigenvalues);
  return report;
}

SpectrumReport lowest_levels(const ProblemSpec& spec, std::size_t count) {
  spec.validate();
  SpectrumReport total;
  ProblemSpec chunk = spec;
  for (int i = 0; i < kMaxChunks; ++i) {
    SpectrumReport part = spectrum(chunk);
    for (auto& r : part.eigenvalues) total.eigenvalues.push_back(std::move(r));
    for (auto& s : part.spurious) total.spurious.push_back(std::move(s));
    dedupe_sorted(total.eigenvalues);
    if (total.eigenvalues.size() >= count) {
      total.eigenvalues.resize(count);
      return total;
    }
    const double width = chunk.e_max - spec.e_min;
    chunk.e_min = chunk.e_max;
    chunk.e_max = spec.e_min + 2.0 * width;
  }
  throw ConvergenceError("lowest_levels: found only " +
                         std::to_string(total.eigenvalues.size()) + " of " +
                         std::to_string(count) + " levels");
}

}  // namespace ptspectra

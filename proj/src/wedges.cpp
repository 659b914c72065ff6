#include "ptspectra/wedges.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {
constexpr double kBoundaryTolerance = 1e-12;
}

double normalize_angle(double theta) {
  double t = std::remainder(theta, 2.0 * kPi);  // [-π, π]
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

WedgePair wedge_geometry(double epsilon, int branch) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw DomainError("wedge_geometry: epsilon must be finite and >= 0, got " +
                      std::to_string(epsilon));
  const double half = kPi / (epsilon + 4.0);
  const double rotation = branch * 2.0 * half;
  const double right0 = -epsilon * kPi / (2.0 * epsilon + 8.0);
  const double left0 = -kPi - right0;

  WedgePair pair;
  pair.epsilon = epsilon;
  pair.branch = branch;
  pair.right = {normalize_angle(right0 + rotation), half};
  pair.left = {normalize_angle(left0 + rotation), half};
  return pair;
}

bool contains(const StokesWedge& wedge, double theta) {
  const double offset = std::remainder(theta - wedge.center, 2.0 * kPi);
  return std::abs(offset) < wedge.half_opening - kBoundaryTolerance;
}

double wkb_exponent_magnitude(double epsilon, double radius) {
  const double p = 0.5 * (epsilon + 4.0);
  return std::pow(radius, p) / p;
}

double contour_radius(double epsilon, double energy_hint, double decay_target) {
  // (2/(ε+4))·R^{(ε+4)/2} = target  =>  R = (target·(ε+4)/2)^{2/(ε+4)}
  const double p = 0.5 * (epsilon + 4.0);
  const double r_decay = std::pow(decay_target * p, 1.0 / p);
  const double r_turning = 2.0 * std::sqrt(std::abs(energy_hint));
  return std::max(r_decay, r_turning);
}

namespace {

// Re ∫ √(V − 1) dx from the unit-energy turning point to −iy, continuing the
// square root along the path. t = s² absorbs the endpoint singularity.
double anti_stokes_defect(double epsilon, double y) {
  constexpr int kNodes = 800;
  const cplx xt = std::polar(1.0, -epsilon * kPi / (2.0 * epsilon + 4.0));
  const cplx xe(0.0, -y);
  const cplx span = xe - xt;
  cplx sum = 0.0, prev = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const double s = (k + 0.5) / kNodes;
    const cplx x = xt + span * (s * s);
    cplx q = std::sqrt(x * x * std::exp(epsilon * std::log(cplx(0.0, 1.0) * x)) - 1.0);
    if (k > 0 && std::abs(q - prev) > std::abs(q + prev)) q = -q;
    prev = q;
    sum += q * (2.0 * s);
  }
  return (sum * span).real() / kNodes;
}

double anti_stokes_depth(double epsilon) {
  thread_local double cached_eps = -1.0, cached_depth = 0.0;
  if (epsilon == cached_eps) return cached_depth;
  double lo = 1e-6, hi = 1.0;
  const double flo = anti_stokes_defect(epsilon, lo);
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((anti_stokes_defect(epsilon, mid) < 0.0) == (flo < 0.0))
      lo = mid;
    else
      hi = mid;
  }
  cached_eps = epsilon;
  cached_depth = 0.5 * (lo + hi);
  return cached_depth;
}

}  // namespace

cplx matching_point(double epsilon, int branch, double energy_hint) {
  if (branch != 0 || epsilon == 0.0 || energy_hint == 0.0) return {0.0, 0.0};
  const double r = std::pow(std::abs(energy_hint), 1.0 / (epsilon + 2.0));
  return {0.0, -r * anti_stokes_depth(epsilon)};
}

Contour plan_contour(const WedgePair& pair, double energy_hint,
                     double decay_target) {
  if (!(decay_target > 0.0))
    throw DomainError("plan_contour: decay_target must be > 0");
  const double radius = contour_radius(pair.epsilon, energy_hint, decay_target);
  Contour c;
  c.vertices = {std::polar(radius, pair.left.center),
                matching_point(pair.epsilon, pair.branch, energy_hint),
                std::polar(radius, pair.right.center)};
  c.match_index = 1;
  c.left_radius = radius;
  c.right_radius = radius;
  return c;
}

}  // namespace ptspectra

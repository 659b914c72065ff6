#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ptspectra {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Angular sector of the complex x-plane. Membership is the open interval
/// (center - half_opening, center + half_opening), taken modulo 2π.
struct StokesWedge {
  double center = 0.0;        // radians, normalized to (-π, π]
  double half_opening = 0.0;  // radians, in (0, π/2]

  double opening() const { return 2.0 * half_opening; }
};

/// Boundary-condition wedges for H = p² + x²(ix)^ε. Branch 0 is the pair
/// continued from the real-axis wedges of the harmonic oscillator; each
/// branch step rotates both wedges by 2π/(ε+4).
struct WedgePair {
  StokesWedge left;
  StokesWedge right;
  double epsilon = 0.0;
  int branch = 0;
};

/// Two straight arms joined at the matching vertex:
/// vertices = {R·e^{i·left}, match, R·e^{i·right}}.
struct Contour {
  std::vector<cplx> vertices;
  std::size_t match_index = 1;
  double left_radius = 0.0;
  double right_radius = 0.0;

  cplx left_end() const { return vertices.front(); }
  cplx right_end() const { return vertices.back(); }
  cplx match_point() const { return vertices[match_index]; }
};

inline constexpr double kDefaultDecayTarget = 30.0;

/// Wraps an angle into (-π, π].
double normalize_angle(double theta);

/// Throws DomainError for epsilon < 0 (or non-finite).
WedgePair wedge_geometry(double epsilon, int branch = 0);

/// Open-interval membership modulo 2π; angles within 1e-12 rad of a
/// boundary count as outside.
bool contains(const StokesWedge& wedge, double theta);

/// Smallest radius R meeting both (2/(ε+4))·R^{(ε+4)/2} ≥ decay_target and
/// R² ≥ 4·|energy_hint|.
double contour_radius(double epsilon, double energy_hint, double decay_target);

/// Matching vertex for energy scale E on branch 0: the point −i·y where the
/// anti-Stokes line leaving the turning point x_t = |E|^{1/(ε+2)}·e^{−iεπ/(2ε+4)}
/// crosses the negative imaginary axis, i.e. Re ∫_{x_t}^{−iy} √(V − E) dx = 0.
/// There the two one-sided solutions are oscillatory with balanced WKB
/// components, so their Wronskian stays well conditioned as E grows. The
/// origin is used for ε = 0, E = 0 and branches other than 0.
cplx matching_point(double epsilon, int branch, double energy_hint);

/// Throws DomainError unless decay_target > 0.
Contour plan_contour(const WedgePair& pair, double energy_hint,
                     double decay_target = kDefaultDecayTarget);

/// Magnitude of the leading WKB exponent (2/(ε+4))·r^{(ε+4)/2}.
double wkb_exponent_magnitude(double epsilon, double radius);

}  // namespace ptspectra

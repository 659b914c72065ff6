#include "ptspectra/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ptspectra {

namespace {

constexpr double kRescaleAbove = 1e100;
constexpr double kRescaleBelow = 1e-100;

// Dormand–Prince 5(4) tableau. Row 7 of kA holds the fifth-order weights
// (first-same-as-last); kErr = fifth − fourth order weights.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kErr[7] = {71.0 / 57600,      0.0,         -71.0 / 16695,
                            71.0 / 1920,       -17253.0 / 339200,
                            22.0 / 525,        -1.0 / 40};

constexpr double kSafety = 0.9;
constexpr double kMaxGrowth = 5.0;
constexpr double kMaxShrink = 0.1;

cplx i_power(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double initial_step(cplx x, cplx energy, double epsilon, double length) {
  const double scale = std::sqrt(std::abs(potential(x, epsilon) - energy)) + 1.0;
  return std::min(length, 0.05 / scale);
}

struct Segment {
  cplx start;
  cplx direction;
  double length;
};

Segment make_segment(cplx a, cplx b) {
  const double len = std::abs(b - a);
  return {a, len > 0.0 ? (b - a) / len : cplx(1.0, 0.0), len};
}

void rescale(WaveState& s) {
  const double m = s.magnitude();
  if ((m > kRescaleAbove || (m < kRescaleBelow && m > 0.0)) && std::isfinite(m)) {
    s.psi /= m;
    s.dpsi /= m;
    s.log_scale += std::log(m);
  }
}

void rescale_lanes(BatchState& s) {
  for (std::size_t l = 0; l < simd::kLanes; ++l) {
    const double m = std::max(std::abs(s.y.psi(l)), std::abs(s.y.dpsi(l)));
    if ((m > kRescaleAbove || (m < kRescaleBelow && m > 0.0)) && std::isfinite(m)) {
      s.y.set(l, s.y.psi(l) / m, s.y.dpsi(l) / m);
      s.log_scale[l] += std::log(m);
    }
  }
}

[[noreturn]] void budget_exhausted(const StepControl& ctl, const WaveState& at) {
  std::ostringstream os;
  os << "integrate: step budget of " << ctl.max_steps << " exhausted at x = "
     << at.x;
  throw IntegrationError(os.str(), at);
}

void check_path_start(cplx seed_x, std::span<const cplx> path) {
  if (path.empty()) throw DomainError("integrate: empty path");
  if (std::abs(path.front() - seed_x) > 1e-12 * (1.0 + std::abs(seed_x)))
    throw DomainError("integrate: path must begin at the seed position");
}

// --- scalar reference integrator -------------------------------------------

struct Pair {
  cplx psi, dpsi;
};

inline Pair eval(cplx x, const Pair& y, cplx u, cplx energy, double epsilon) {
  return {u * y.dpsi, u * ((potential(x, epsilon) - energy) * y.psi)};
}

inline Pair axpy(const Pair& y, double w, const Pair& k) {
  return {y.psi + w * k.psi, y.dpsi + w * k.dpsi};
}

void rk4_segment(WaveState& s, const Segment& seg, cplx energy, double epsilon,
                 const StepControl& ctl, std::size_t& steps) {
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(seg.length / ctl.step - 1e-9)));
  const double h = seg.length / static_cast<double>(n);
  const cplx u = seg.direction;
  for (std::size_t i = 0; i < n; ++i) {
    if (++steps > ctl.max_steps) budget_exhausted(ctl, s);
    const double t = h * static_cast<double>(i);
    const cplx x0 = seg.start + u * t;
    const cplx xm = seg.start + u * (t + 0.5 * h);
    const cplx x1 = (i + 1 == n) ? seg.start + u * seg.length : seg.start + u * (t + h);
    const Pair y{s.psi, s.dpsi};
    const Pair k1 = eval(x0, y, u, energy, epsilon);
    const Pair k2 = eval(xm, axpy(y, 0.5 * h, k1), u, energy, epsilon);
    const Pair k3 = eval(xm, axpy(y, 0.5 * h, k2), u, energy, epsilon);
    const Pair k4 = eval(x1, axpy(y, h, k3), u, energy, epsilon);
    s.psi += (h / 6.0) * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
    s.dpsi += (h / 6.0) * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
    s.x = x1;
    rescale(s);
  }
}

void dp45_segment(WaveState& s, const Segment& seg, cplx energy,
                  double epsilon, const StepControl& ctl, std::size_t& steps,
                  double& h) {
  const cplx u = seg.direction;
  double t = 0.0;
  Pair k[7];
  bool have_first = false;
  while (t < seg.length) {
    if (++steps > ctl.max_steps) budget_exhausted(ctl, s);
    const bool last = t + h >= seg.length * (1.0 - 1e-14);
    const double step = last ? seg.length - t : h;
    const Pair y{s.psi, s.dpsi};
    if (!have_first) {
      k[0] = eval(seg.start + u * t, y, u, energy, epsilon);
      have_first = true;
    }
    Pair y1 = y;  // the stage-7 input is the fifth-order solution
    for (int st = 1; st < 7; ++st) {
      y1 = y;
      for (int j = 0; j < st; ++j)
        if (kA[st][j] != 0.0) y1 = axpy(y1, step * kA[st][j], k[j]);
      k[st] = eval(seg.start + u * (t + kC[st] * step), y1, u, energy, epsilon);
    }
    Pair err{};
    for (int j = 0; j < 7; ++j) err = axpy(err, step * kErr[j], k[j]);
    const double sc_psi =
        ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y.psi), std::abs(y1.psi));
    const double sc_dpsi =
        ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y.dpsi), std::abs(y1.dpsi));
    const double norm =
        std::max(std::abs(err.psi) / sc_psi, std::abs(err.dpsi) / sc_dpsi);

    if (norm <= 1.0 && std::isfinite(norm)) {
      t = last ? seg.length : t + step;
      s.psi = y1.psi;
      s.dpsi = y1.dpsi;
      s.x = last ? seg.start + u * seg.length : seg.start + u * t;
      k[0] = k[6];
      const double m = s.magnitude();
      if (m > kRescaleAbove || (m < kRescaleBelow && m > 0.0)) {
        rescale(s);
        have_first = false;
      }
      const double grow = norm > 0.0 ? kSafety * std::pow(norm, -0.2) : kMaxGrowth;
      if (!last) h = step * std::min(kMaxGrowth, grow);
    } else {
      const double shrink = std::isfinite(norm) ? kSafety * std::pow(norm, -0.2) : kMaxShrink;
      h = step * std::clamp(shrink, kMaxShrink, 1.0);
    }
  }
}

// --- lane-parallel integrator ------------------------------------------------

void rk4_segment_batch(BatchState& s, const Segment& seg,
                       const simd::LaneEnergies& e, double epsilon,
                       const StepControl& ctl, std::size_t& steps,
                       const simd::KernelTable& kt) {
  static constexpr double kHalf[1] = {0.5};
  static constexpr double kFull[3] = {0.0, 0.0, 1.0};
  static constexpr double kWeights[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(seg.length / ctl.step - 1e-9)));
  const double h = seg.length / static_cast<double>(n);
  const cplx u = seg.direction;
  simd::LaneBlock k[4];
  simd::LaneBlock tmp;
  for (std::size_t i = 0; i < n; ++i) {
    if (++steps > ctl.max_steps)
      throw IntegrationError("integrate_batch: step budget exhausted", WaveState{s.x});
    const double t = h * static_cast<double>(i);
    const cplx v0 = potential(seg.start + u * t, epsilon);
    const cplx vm = potential(seg.start + u * (t + 0.5 * h), epsilon);
    const cplx x1 = (i + 1 == n) ? seg.start + u * seg.length : seg.start + u * (t + h);
    const cplx v1 = potential(x1, epsilon);
    kt.derivative(s.y, v0, u, e, k[0]);
    kt.combine(s.y, &k[0], kHalf, 1, h, tmp);
    kt.derivative(tmp, vm, u, e, k[1]);
    kt.combine(s.y, &k[1], kHalf, 1, h, tmp);
    kt.derivative(tmp, vm, u, e, k[2]);
    kt.combine(s.y, k, kFull, 3, h, tmp);
    kt.derivative(tmp, v1, u, e, k[3]);
    kt.combine(s.y, k, kWeights, 4, h, s.y);
    s.x = x1;
    rescale_lanes(s);
  }
}

void dp45_segment_batch(BatchState& s, const Segment& seg,
                        const simd::LaneEnergies& e, double epsilon,
                        const StepControl& ctl, std::size_t& steps, double& h,
                        const simd::KernelTable& kt) {
  const cplx u = seg.direction;
  double t = 0.0;
  simd::LaneBlock k[7];
  simd::LaneBlock stage, y1, err;
  const simd::LaneBlock zero{};
  bool have_first = false;
  while (t < seg.length) {
    if (++steps > ctl.max_steps)
      throw IntegrationError("integrate_batch: step budget exhausted", WaveState{s.x});
    const bool last = t + h >= seg.length * (1.0 - 1e-14);
    const double step = last ? seg.length - t : h;
    if (!have_first) {
      kt.derivative(s.y, potential(seg.start + u * t, epsilon), u, e, k[0]);
      have_first = true;
    }
    for (std::size_t st = 1; st < 7; ++st) {
      kt.combine(s.y, k, kA[st], st, step, stage);
      kt.derivative(stage, potential(seg.start + u * (t + kC[st] * step), epsilon),
                    u, e, k[st]);
    }
    y1 = stage;  // stage 7 input is the fifth-order solution
    kt.combine(zero, k, kErr, 7, step, err);
    const double norm = kt.error_norm(err, s.y, y1, ctl.abs_tol, ctl.rel_tol);

    if (norm <= 1.0 && std::isfinite(norm)) {
      t = last ? seg.length : t + step;
      s.y = y1;
      s.x = last ? seg.start + u * seg.length : seg.start + u * t;
      k[0] = k[6];
      const auto before = s.log_scale;
      rescale_lanes(s);
      if (before != s.log_scale) have_first = false;
      const double grow = norm > 0.0 ? kSafety * std::pow(norm, -0.2) : kMaxGrowth;
      if (!last) h = step * std::min(kMaxGrowth, grow);
    } else {
      const double shrink = std::isfinite(norm) ? kSafety * std::pow(norm, -0.2) : kMaxShrink;
      h = step * std::clamp(shrink, kMaxShrink, 1.0);
    }
  }
}

}  // namespace

double WaveState::magnitude() const {
  return std::max(std::abs(psi), std::abs(dpsi));
}

void StepControl::validate() const {
  if (mode == StepMode::fixed && !(step > 0.0))
    throw DomainError("StepControl: fixed step must be > 0");
  if (mode == StepMode::adaptive && !(rel_tol > 0.0 && abs_tol > 0.0))
    throw DomainError("StepControl: tolerances must be > 0");
  if (max_steps < 1) throw DomainError("StepControl: max_steps must be >= 1");
}

std::string StepControl::describe() const {
  std::ostringstream os;
  if (mode == StepMode::fixed)
    os << "rk4 fixed h=" << step;
  else
    os << "dopri5 adaptive rtol=" << rel_tol << " atol=" << abs_tol;
  return os.str();
}

cplx potential(cplx x, double epsilon) {
  if (x == cplx(0.0, 0.0)) return {0.0, 0.0};
  const double rounded = std::round(epsilon);
  if (epsilon == rounded && rounded >= 0.0 && rounded <= 64.0) {
    const auto n = static_cast<long>(rounded);
    cplx xp = x * x;
    for (long j = 0; j < n; ++j) xp *= x;
    return i_power(n) * xp;
  }
  return x * x * std::exp(epsilon * std::log(cplx(0.0, 1.0) * x));
}

Derivative rhs(const WaveState& state, cplx energy, double epsilon) {
  return {state.dpsi, (potential(state.x, epsilon) - energy) * state.psi};
}

WaveState wkb_seed(cplx x0, cplx energy, double epsilon, cplx inward_direction) {
  const cplx v = potential(x0, epsilon);
  if (!(std::abs(v) > std::abs(energy))) {
    std::ostringstream os;
    os << "wkb_seed: endpoint inside turning region (|V(x0)| = " << std::abs(v)
       << " <= |E| = " << std::abs(energy) << ")";
    throw DomainError(os.str());
  }
  const cplx root = std::sqrt(v - energy);
  // Growth along the inward direction: Re(ψ′/ψ · direction) > 0.
  const double sign = (-root * inward_direction).real() > 0.0 ? 1.0 : -1.0;
  WaveState s;
  s.x = x0;
  s.psi = {1.0, 0.0};
  s.dpsi = -sign * root;
  return s;
}

WaveState integrate(const WaveState& seed, std::span<const cplx> path,
                    cplx energy, double epsilon, const StepControl& ctl) {
  ctl.validate();
  check_path_start(seed.x, path);
  WaveState s = seed;
  std::size_t steps = 0;
  double h = -1.0;
  for (std::size_t v = 1; v < path.size(); ++v) {
    const Segment seg = make_segment(path[v - 1], path[v]);
    if (seg.length == 0.0) continue;
    if (ctl.mode == StepMode::fixed) {
      rk4_segment(s, seg, energy, epsilon, ctl, steps);
    } else {
      if (h <= 0.0) h = initial_step(seg.start, energy, epsilon, seg.length);
      dp45_segment(s, seg, energy, epsilon, ctl, steps, h);
    }
    s.x = path[v];
  }
  return s;
}

BatchState integrate_batch(const BatchState& seed, std::span<const cplx> path,
                           const simd::LaneEnergies& energies, double epsilon,
                           const StepControl& ctl, const simd::KernelTable& kernels) {
  ctl.validate();
  check_path_start(seed.x, path);
  BatchState s = seed;
  std::size_t steps = 0;
  double h = -1.0;
  double e_max = 0.0;
  for (std::size_t l = 0; l < simd::kLanes; ++l)
    e_max = std::max(e_max, std::hypot(energies.re[l], energies.im[l]));
  for (std::size_t v = 1; v < path.size(); ++v) {
    const Segment seg = make_segment(path[v - 1], path[v]);
    if (seg.length == 0.0) continue;
    if (ctl.mode == StepMode::fixed) {
      rk4_segment_batch(s, seg, energies, epsilon, ctl, steps, kernels);
    } else {
      if (h <= 0.0) h = initial_step(seg.start, cplx(e_max, 0.0), epsilon, seg.length);
      dp45_segment_batch(s, seg, energies, epsilon, ctl, steps, h, kernels);
    }
    s.x = path[v];
  }
  return s;
}

cplx normalized_wronskian(const WaveState& a, const WaveState& b) {
  const double scale = a.magnitude() * b.magnitude();
  return (a.psi * b.dpsi - a.dpsi * b.psi) / scale;
}

}  // namespace ptspectra

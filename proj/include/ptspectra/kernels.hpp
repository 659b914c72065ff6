#pragma once
// Lane-parallel arithmetic for the shooting integrator and the QR sweeps.
//
// Every kernel has a scalar reference implementation; an AVX2+FMA variant is
// compiled separately and selected at runtime when the CPU supports it. The
// two must agree to rounding (see tests/test_kernels.cpp).

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>

namespace ptspectra::simd {

using cplx = std::complex<double>;

/// Number of independent ODE solutions advanced together.
inline constexpr std::size_t kLanes = 4;

/// Structure-of-arrays (ψ, ψ′) for kLanes solutions sharing one path.
struct LaneBlock {
  alignas(32) std::array<double, kLanes> psi_re{};
  alignas(32) std::array<double, kLanes> psi_im{};
  alignas(32) std::array<double, kLanes> dpsi_re{};
  alignas(32) std::array<double, kLanes> dpsi_im{};

  cplx psi(std::size_t l) const { return {psi_re[l], psi_im[l]}; }
  cplx dpsi(std::size_t l) const { return {dpsi_re[l], dpsi_im[l]}; }
  void set(std::size_t l, cplx psi, cplx dpsi) {
    psi_re[l] = psi.real();
    psi_im[l] = psi.imag();
    dpsi_re[l] = dpsi.real();
    dpsi_im[l] = dpsi.imag();
  }
};

/// Per-lane spectral parameter E.
struct LaneEnergies {
  alignas(32) std::array<double, kLanes> re{};
  alignas(32) std::array<double, kLanes> im{};
};

struct KernelTable {
  std::string_view name;

  /// k.psi = u·dpsi, k.dpsi = u·(v − E)·psi: the arclength derivative of the
  /// first-order system along a segment with unit direction u, where v is
  /// the potential at the stage point (shared by all lanes).
  void (*derivative)(const LaneBlock& y, cplx v, cplx u, const LaneEnergies& e,
                     LaneBlock& k);

  /// out = y + h·Σ_{j<count} coef[j]·k[j]. Coefficients equal to zero are
  /// skipped.
  void (*combine)(const LaneBlock& y, const LaneBlock* k, const double* coef,
                  std::size_t count, double h, LaneBlock& out);

  /// max over lanes and components of |err| / (atol + rtol·max(|y0|, |y1|)).
  double (*error_norm)(const LaneBlock& err, const LaneBlock& y0,
                       const LaneBlock& y1, double atol, double rtol);

  /// Plane rotation of two contiguous complex rows:
  ///   x ← c·x + s·y,  y ← −conj(s)·x + c·y.
  void (*rotate)(cplx* x, cplx* y, std::size_t n, double c, cplx s);
};

const KernelTable& scalar_kernels();

/// nullptr when not compiled in or not supported by the running CPU.
const KernelTable* avx2_kernels();

/// Kernel set in use: AVX2 when available unless PT_SPECTRA_SIMD=scalar.
const KernelTable& active_kernels();

}  // namespace ptspectra::simd

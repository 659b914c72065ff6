// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ptspectra/analysis.hpp"
#include "ptspectra/cli.hpp"
#include "ptspectra/eig.hpp"
#include "ptspectra/hobasis.hpp"
#include "ptspectra/kernels.hpp"
#include "ptspectra/ode.hpp"
#include "ptspectra/output.hpp"
#include "ptspectra/shooting.hpp"

using namespace ptspectra;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> cli_energies(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  if (cli::run(args, out, err) != cli::kOk) return {};
  std::istringstream in(out.str());
  std::vector<double> e;
  for (const SpectrumRow& r : read_spectrum_csv(in)) e.push_back(r.energy.real());
  return e;
}

Outcome ladder_match(const std::vector<double>& got, const std::vector<double>& want) {
  if (got.size() != want.size())
    return {false, "got " + std::to_string(got.size()) + " levels, want " +
                       std::to_string(want.size())};
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  return {worst < 1e-8, "max |E - exact| = " + fmt("%.2e", worst)};
}

// --- criterion bodies ---------------------------------------------------------

Outcome oscillator_exactness() {
  return ladder_match(cli_energies({"shoot", "--epsilon", "0", "--emin", "0", "--emax", "12"}),
                      {1, 3, 5, 7, 9, 11});
}

Outcome wedge_choice() {
  return ladder_match(cli_energies({"shoot", "--epsilon", "0", "--branch", "1", "--emin", "-8",
                                    "--emax", "0"}),
                      {-7, -5, -3, -1});
}

Outcome reality() {
  std::ostringstream d;
  bool ok = true;
  for (double eps : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    ProblemSpec s;
    s.epsilon = eps;
    s.e_min = 0.0;
    s.e_max = 20.0;
    const SpectrumReport r = spectrum(s);
    double worst = 0.0;
    for (const ShootingResult& e : r.eigenvalues) {
      worst = std::max(worst, std::abs(e.energy.imag()) / (1.0 + std::abs(e.energy.real())));
      if (!classified_real(e.energy)) ok = false;
    }
    if (r.eigenvalues.empty()) ok = false;
    d << "eps=" << eps << ": " << r.eigenvalues.size() << " levels, max|Im|/(1+|Re|)="
      << fmt("%.1e", worst) << "; ";
  }
  return {ok, d.str()};
}

// Criteria 4 and 5 share the ε = 1 trace.
struct Epsilon1Run {
  std::vector<cplx> shooting;
  StabilizationTrace trace;
};

const Epsilon1Run& epsilon1_run() {
  static const Epsilon1Run run = [] {
    Epsilon1Run r;
    ProblemSpec s;
    s.epsilon = 1.0;
    s.e_min = 0.0;
    s.e_max = 12.0;
    for (const ShootingResult& e : lowest_levels(s, 4).eigenvalues) r.shooting.push_back(e.energy);
    std::vector<std::size_t> n;
    for (std::size_t k = 20; k <= 100; k += 10) n.push_back(k);
    r.trace = stabilization_trace(1, n, 10);
    return r;
  }();
  return run;
}

Outcome cross_method() {
  const Epsilon1Run& r = epsilon1_run();
  if (r.shooting.size() != 4) return {false, "fewer than 4 shooting levels"};
  const std::vector<cplx>& t = r.trace.levels.back();
  double worst = 0.0;
  for (std::size_t l = 0; l < 4; ++l)
    worst = std::max(worst, std::abs(t[l] - r.shooting[l]) / std::abs(r.shooting[l]));
  return {worst < 1e-3, "max relative deviation at N=100: " + fmt("%.2e", worst)};
}

Outcome half_dozen() {
  const std::size_t c = settled_count(epsilon1_run().trace, 1e-3);
  return {c >= 4 && c <= 10, "settled_count = " + std::to_string(c) + " (N = 20..100 step 10)"};
}

// Criteria 6 and 8 share the N = 100 truncation.
Outcome artifacts() {
  std::size_t first_pair_n = 0, unpaired_total = 0;
  double max_im = 0.0;
  for (std::size_t n = 10; n <= 100; ++n) {
    const TruncatedHamiltonian h = build_truncation(1, n);
    const SpectrumSet s = eigenvalues(h.entries, "truncation eps=1 N=" + std::to_string(n));
    const PairAudit a = conjugate_pair_audit(s);
    unpaired_total += a.unpaired.size();
    for (const cplx& e : s.values)
      if (std::abs(e.imag()) > 1e-6) {
        max_im = std::max(max_im, std::abs(e.imag()));
        if (!first_pair_n) first_pair_n = n;
      }
  }
  const bool ok = first_pair_n != 0 && unpaired_total == 0;
  return {ok, "first complex pair at N=" + std::to_string(first_pair_n) + ", max |Im| " +
                  fmt("%.3g", max_im) + ", unpaired " + std::to_string(unpaired_total) +
                  " over N=10..100"};
}

Outcome wkb_growth() {
  ProblemSpec s;
  s.epsilon = 1.0;
  s.e_min = 0.0;
  s.e_max = 8.0;
  const SpectrumReport r = lowest_levels(s, 31);
  std::vector<Level> levels;
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
    levels.push_back({static_cast<int>(i), r.eigenvalues[i].energy.real()});
  const GrowthFit f = wkb_growth_fit(levels, 10, 30);
  return {f.slope >= 1.18 && f.slope <= 1.22,
          "slope " + fmt("%.6f", f.slope) + " +- " + fmt("%.1e", f.std_error) + ", E_30 = " +
              fmt("%.6f", levels.back().energy)};
}

Outcome truncation_growth_failure() {
  const SpectrumSet s = eigenvalues(build_truncation(1, 100).entries, "truncation eps=1 N=100");
  const std::vector<cplx> low = lowest_lying(s, 91);
  std::size_t non_real = 0;
  std::vector<Level> levels;
  for (int n = 20; n <= 90; ++n) {
    if (!classified_real(low[n])) ++non_real;
    levels.push_back({n, std::abs(low[n])});
  }
  const GrowthFit f = wkb_growth_fit(levels, 20, 90);
  const bool outside = f.slope < 1.18 || f.slope > 1.22;
  return {outside || non_real > 0, "slope of |E_n| " + fmt("%.4f", f.slope) + ", " +
                                       std::to_string(non_real) +
                                       " of 71 levels fail the reality threshold"};
}

// Oracles for criterion 9, independent of the library code paths.
double hermite_worst() {
  const int nmax = 20, pts = 3201;
  const double half = 16.0, dx = 2 * half / (pts - 1);
  std::vector<std::vector<double>> h(nmax + 1, std::vector<double>(pts));
  for (int i = 0; i < pts; ++i) {
    const double x = -half + i * dx;
    h[0][i] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    h[1][i] = std::sqrt(2.0) * x * h[0][i];
    for (int n = 2; n <= nmax; ++n)
      h[n][i] = std::sqrt(2.0 / n) * x * h[n - 1][i] - std::sqrt((n - 1.0) / n) * h[n - 2][i];
  }
  double worst = 0.0;
  for (int k = 0; k <= 6; ++k) {
    const RealMatrix xk = position_power_matrix(k, nmax + 1);
    for (int m = 0; m <= nmax; ++m)
      for (int n = 0; n <= nmax; ++n) {
        double q = 0.0;
        for (int i = 0; i < pts; ++i) q += h[m][i] * std::pow(-half + i * dx, k) * h[n][i];
        q *= dx;
        worst = std::max(worst, std::abs(xk(m, n) - q) / (1.0 + std::abs(q)));
      }
  }
  return worst;
}

cplx lu_det(ComplexMatrix a) {
  const std::size_t n = a.size();
  cplx det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(p, k))) p = r;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(p, c));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

std::size_t eig_contract_failures() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::size_t fail = 0;
  for (int t = 0; t < 200; ++t) {
    ComplexMatrix a(8), p(8);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) {
        a(r, c) = {g(rng), g(rng)};
        p(r, c) = cplx(u(rng), u(rng)) / std::sqrt(8.0) + (r == c ? 1.0 : 0.0);
      }
    const SpectrumSet s = eigenvalues(a);
    cplx tr = 0, sum = 0, prod = 1;
    for (std::size_t i = 0; i < 8; ++i) tr += a(i, i);
    for (const cplx& l : s.values) {
      sum += l;
      prod *= l;
    }
    const cplx det = lu_det(a);
    if (std::abs(sum - tr) > 1e-10 * (1 + std::abs(tr))) ++fail;
    if (std::abs(prod - det) > 1e-8 * std::abs(det)) ++fail;

    // Similarity: B = P⁻¹AP via solving P·B = A·P column by column.
    ComplexMatrix ap(8), b(8);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c)
        for (std::size_t k = 0; k < 8; ++k) ap(r, c) += a(r, k) * p(k, c);
    ComplexMatrix lu = p;
    std::vector<std::size_t> piv(8);
    for (std::size_t k = 0; k < 8; ++k) {
      std::size_t q = k;
      for (std::size_t r = k + 1; r < 8; ++r)
        if (std::abs(lu(r, k)) > std::abs(lu(q, k))) q = r;
      piv[k] = q;
      for (std::size_t c = 0; c < 8; ++c) std::swap(lu(k, c), lu(q, c));
      for (std::size_t r = k + 1; r < 8; ++r) {
        lu(r, k) /= lu(k, k);
        for (std::size_t c = k + 1; c < 8; ++c) lu(r, c) -= lu(r, k) * lu(k, c);
      }
    }
    for (std::size_t c = 0; c < 8; ++c) {
      std::vector<cplx> x(8);
      for (std::size_t r = 0; r < 8; ++r) x[r] = ap(r, c);
      for (std::size_t k = 0; k < 8; ++k) std::swap(x[k], x[piv[k]]);
      for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t k = 0; k < r; ++k) x[r] -= lu(r, k) * x[k];
      for (std::size_t r = 8; r-- > 0;) {
        for (std::size_t k = r + 1; k < 8; ++k) x[r] -= lu(r, k) * x[k];
        x[r] /= lu(r, r);
      }
      for (std::size_t r = 0; r < 8; ++r) b(r, c) = x[r];
    }
    std::vector<cplx> sb = eigenvalues(b).values;
    for (const cplx& l : s.values) {
      auto best = std::min_element(sb.begin(), sb.end(), [&](cplx x, cplx y) {
        return std::abs(x - l) < std::abs(y - l);
      });
      if (std::abs(*best - l) > 1e-8 * (1 + std::abs(l))) ++fail;
      sb.erase(best);
    }
  }
  return fail;
}

double rk4_ratio() {
  auto err = [](double h) {
    WaveState s;
    const std::vector<cplx> path{0.0, 1.0};
    const WaveState e = integrate(s, path, 1.0, 0.0, StepControl::fixed(h));
    return std::abs(std::exp(e.log_scale) * e.psi - std::exp(-0.5));
  };
  return err(0.1) / err(0.05);
}

double wronskian_drift() {
  const std::vector<cplx> pts{0.0, cplx(1.0, -0.5), cplx(2.0, -1.0), cplx(1.0, -2.0),
                              cplx(-2.0, -1.0)};
  WaveState a, b;
  b.psi = 0.0;
  b.dpsi = 1.0;
  const cplx e(1.5, 0.3);
  const cplx w0 = a.psi * b.dpsi - a.dpsi * b.psi;
  double worst = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const std::vector<cplx> seg{pts[k - 1], pts[k]};
    a = integrate(a, seg, e, 1.0, StepControl::adaptive());
    b = integrate(b, seg, e, 1.0, StepControl::adaptive());
    const cplx w = std::exp(a.log_scale + b.log_scale) * (a.psi * b.dpsi - a.dpsi * b.psi);
    worst = std::max(worst, std::abs(w - w0) / std::abs(w0));
  }
  return worst;
}

Outcome oracle_suites() {
  const double hq = hermite_worst();
  const std::size_t ef = eig_contract_failures();
  const double ratio = rk4_ratio();
  const double wd = wronskian_drift();
  const bool ok = hq < 1e-10 && ef == 0 && ratio >= 12 && ratio <= 20 && wd < 1e-8;
  return {ok, "quadrature " + fmt("%.1e", hq) + ", eig contract failures " + std::to_string(ef) +
                  "/600, RK4 ratio " + fmt("%.2f", ratio) + ", Wronskian drift " +
                  fmt("%.1e", wd)};
}

Outcome basis_invalidity() {
  const ComparisonReport r = compare_methods(2, 3, 100);
  double worst = 0.0;
  for (std::size_t l = 0; l < 3; ++l) worst = std::max(worst, r.rel_deviation[l]);
  const bool ok = !r.basis_valid && !r.note.empty() && worst > 10 * r.settle_tolerance;
  return {ok, "basis_valid=" + std::string(r.basis_valid ? "true" : "false") +
                  ", max relative deviation of lowest 3 = " + fmt("%.3g", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {"oscillator exactness", 5, oscillator_exactness},
      {"wedge-choice dependence", 5, wedge_choice},
      {"reality for eps >= 0", 120, reality},
      {"cross-method agreement at eps=1", 60, cross_method},
      {"half-a-dozen rule", 60, half_dozen},
      {"artifact detection", 60, artifacts},
      {"WKB growth", 300, wkb_growth},
      {"high-lying truncation failure", 60, truncation_growth_failure},
      {"oracle suites", 60, oracle_suites},
      {"eps >= 2 basis invalidity", 60, basis_invalidity},
  };

  std::printf("kernels: %s\n", std::string(simd::active_kernels().name).c_str());
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < criteria[i].limit_seconds;
    const bool ok = o.pass && in_time;
    passed += ok;
    std::printf("[%s] %2zu. %s: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str(), secs, criteria[i].limit_seconds);
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}

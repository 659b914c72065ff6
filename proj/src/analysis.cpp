#include "ptspectra/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptspectra/error.hpp"
#include "ptspectra/hobasis.hpp"
#include "ptspectra/parallel.hpp"

namespace ptspectra {

std::vector<cplx> lowest_lying(const SpectrumSet& s, std::size_t k) {
  std::vector<cplx> v = s.values;
  std::stable_sort(v.begin(), v.end(), [](cplx a, cplx b) {
    const double ma = std::abs(a), mb = std::abs(b);
    return ma < mb || (ma == mb && a.imag() < b.imag());
  });
  v.resize(std::min(k, v.size()));
  return v;
}

StabilizationTrace stabilization_trace(int epsilon, std::span<const std::size_t> n_values,
                                       std::size_t k) {
  if (n_values.empty()) throw DomainError("stabilization_trace: empty N list");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1])
      throw DomainError("stabilization_trace: N values must be strictly ascending");
  if (k == 0 || k > n_values.front())
    throw DomainError("stabilization_trace: need 1 <= k <= min(N)");

  StabilizationTrace t;
  t.epsilon = epsilon;
  t.k = k;
  t.n_values.assign(n_values.begin(), n_values.end());
  t.levels.resize(n_values.size());
  parallel_for(n_values.size(), [&](std::size_t row) {
    const TruncatedHamiltonian h = build_truncation(epsilon, n_values[row]);
    const SpectrumSet s = eigenvalues(h.entries, "truncation eps=" + std::to_string(epsilon) +
                                                     " N=" + std::to_string(n_values[row]));
    t.levels[row] = lowest_lying(s, k);
  });
  return t;
}

std::size_t settled_count(const StabilizationTrace& trace, double tol) {
  const std::size_t rows = trace.levels.size();
  if (rows < 3) throw DomainError("settled_count: need at least three N values");
  const auto& a = trace.levels[rows - 3];
  const auto& b = trace.levels[rows - 2];
  const auto& c = trace.levels[rows - 1];
  auto moved = [tol](cplx from, cplx to) {
    return std::abs(to - from) >= tol * std::abs(to);
  };
  std::size_t m = 0;
  while (m < trace.k) {
    if (moved(a[m], b[m]) || moved(b[m], c[m]) || !classified_real(c[m])) break;
    ++m;
  }
  return m;
}

GrowthFit wkb_growth_fit(std::span<const Level> levels, int n_from, int n_to) {
  if (n_to - n_from < 5) throw DomainError("wkb_growth_fit: window must span at least 5 levels");
  std::vector<double> xs, ys;
  for (const Level& l : levels) {
    if (l.n < n_from || l.n > n_to) continue;
    if (!(l.energy > 0.0))
      throw DomainError("wkb_growth_fit: nonpositive energy at level " + std::to_string(l.n));
    xs.push_back(std::log(l.n + 0.5));
    ys.push_back(std::log(l.energy));
  }
  if (xs.size() < 3) throw DomainError("wkb_growth_fit: fewer than three levels in window");

  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  GrowthFit f;
  f.points = xs.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ssr += r * r;
  }
  f.std_error = xs.size() > 2 ? std::sqrt(ssr / (m - 2.0) / sxx) : 0.0;
  return f;
}

std::vector<std::size_t> default_n_ladder(std::size_t n_max, std::size_t levels) {
  const std::size_t step = std::max<std::size_t>(1, n_max / 10);
  const std::size_t floor_n = std::max<std::size_t>(levels, 1);
  std::vector<std::size_t> out;
  for (std::size_t n = n_max; n >= floor_n; n -= step) {
    out.push_back(n);
    if (n < step) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

ComparisonReport compare_methods(int epsilon, std::size_t levels, std::size_t n_max,
                                 const CompareOptions& options) {
  if (!supported_basis_epsilon(epsilon))
    throw DomainError("compare_methods: epsilon must be one of {0,1,2,4,6}");
  if (levels == 0 || levels > n_max)
    throw DomainError("compare_methods: need 1 <= levels <= N_max");

  ComparisonReport r;
  r.epsilon = epsilon;
  r.n_max = n_max;
  r.settle_tolerance = options.settle_tolerance;

  ProblemSpec spec;
  spec.epsilon = epsilon;
  spec.branch = 0;
  spec.step = options.step;
  spec.decay_target = options.decay_target;
  spec.e_min = 0.0;
  spec.e_max = 8.0;
  for (const ShootingResult& s : lowest_levels(spec, levels).eigenvalues)
    r.shooting.push_back(s.energy);

  const std::vector<std::size_t> ladder = default_n_ladder(n_max, levels);
  r.trace = stabilization_trace(epsilon, ladder, levels);
  r.truncation = r.trace.levels.back();
  r.settled_count = r.trace.levels.size() >= 3 ? settled_count(r.trace, options.settle_tolerance) : 0;

  for (std::size_t l = 0; l < levels; ++l) {
    const double dev = std::abs(r.truncation[l] - r.shooting[l]);
    r.abs_deviation.push_back(dev);
    r.rel_deviation.push_back(dev / std::abs(r.shooting[l]));
    double nearest = std::numeric_limits<double>::infinity();
    for (const cplx& e : r.shooting)
      nearest = std::min(nearest, std::abs(r.truncation[l] - e) / std::abs(e));
    r.verdicts.push_back(nearest < 10.0 * options.settle_tolerance ? Verdict::converged
                                                                    : Verdict::artifact);
  }

  if (epsilon >= 2) {
    r.basis_valid = false;
    r.note =
        "oscillator basis is not complete in the complex plane: for epsilon >= 2 the "
        "boundary-condition wedges exclude the real axis, so the truncated matrix "
        "represents the real-axis problem, not the wedge eigenproblem solved by shooting";
  }
  return r;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::converged ? "converged" : "artifact";
}

}  // namespace ptspectra

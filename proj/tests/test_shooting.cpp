#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "ptspectra/analysis.hpp"
#include "ptspectra/eig.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/hobasis.hpp"
#include "ptspectra/shooting.hpp"

using namespace ptspectra;

namespace {

ProblemSpec make_spec(double eps, int branch, double lo, double hi) {
  ProblemSpec s;
  s.epsilon = eps;
  s.branch = branch;
  s.e_min = lo;
  s.e_max = hi;
  return s;
}

std::vector<double> real_parts(const SpectrumReport& r) {
  std::vector<double> out;
  for (const auto& e : r.eigenvalues) out.push_back(e.energy.real());
  return out;
}

}  // namespace

TEST_CASE("matching residual examples") {
  CHECK(std::abs(matching_residual(make_spec(0, 0, 0, 12), 1.0)) < 1e-9);
  CHECK(std::abs(matching_residual(make_spec(0, 0, 0, 12), 2.0)) > 0.01);
  CHECK(std::abs(matching_residual(make_spec(0, 1, -8, 0), -1.0)) < 1e-9);
  CHECK(std::abs(matching_residual(make_spec(0, 1, -8, 0), -2.0)) > 0.01);
}

TEST_CASE("scan examples") {
  ProblemSpec s = make_spec(0, 0, 0, 8);
  s.grid = 161;
  const std::vector<Bracket> b = scan(s);
  REQUIRE(b.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(b[k].lo <= 2 * k + 1);
    CHECK(b[k].hi >= 2 * k + 1);
    CHECK(b[k].hi - b[k].lo < 0.2);
  }
  CHECK(scan(make_spec(0, 0, 1.5, 2.5)).empty());
  CHECK(scan(make_spec(0, 0, 4.0 - 1e-9, 4.0)).empty());
  CHECK_THROWS_AS(scan(make_spec(0, 0, 3, 3)), DomainError);
}

TEST_CASE("scan grid default") {
  CHECK(make_spec(0, 0, 0, 8).grid_points() == 161);
  CHECK(make_spec(0, 0, 0, 20).grid_points() == 401);
  ProblemSpec s = make_spec(0, 0, 0, 8);
  s.grid = 1;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("refine examples") {
  const ShootingResult r = refine(make_spec(0, 0, 0, 8), {2.95, 3.05});
  CHECK(std::abs(r.energy - 3.0) < 1e-9);
  CHECK(std::abs(r.residual) <= kResidualAcceptance);
  CHECK(r.classified_real);
  CHECK(r.iterations >= 1);
  CHECK(r.history.size() == static_cast<std::size_t>(r.iterations) + 2);

  const ShootingResult m = refine(make_spec(0, 1, -8, 0), {-3.05, -2.95});
  CHECK(std::abs(m.energy + 3.0) < 1e-9);

  // A bracket between two levels lands outside its widened interval.
  CHECK_THROWS_AS(refine(make_spec(0, 0, 0, 8), {1.9, 2.1}), ConvergenceError);
}

TEST_CASE("lowest epsilon 1 level against a large truncation") {
  const std::vector<Bracket> b = scan(make_spec(1, 0, 0, 8));
  REQUIRE(!b.empty());
  const ShootingResult r = refine(make_spec(1, 0, 0, 8), b.front());
  const SpectrumSet t = eigenvalues(build_truncation(1, 128).entries, "eps=1 N=128");
  const cplx oracle = lowest_lying(t, 1).front();
  CHECK(std::abs(r.energy - oracle) < 1e-5);
  CHECK(r.energy.real() == doctest::Approx(1.15627).epsilon(5e-6));
}

TEST_CASE("spectrum examples") {
  const SpectrumReport ho = spectrum(make_spec(0, 0, 0, 12));
  const std::vector<double> e = real_parts(ho);
  REQUIRE(e.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(e[k] - (2 * k + 1)) < 1e-9);
  CHECK(ho.spurious.empty());

  const SpectrumReport one = spectrum(make_spec(1, 0, 0, 12));
  REQUIRE(one.eigenvalues.size() == 4);
  for (const auto& r : one.eigenvalues) {
    CHECK(r.classified_real);
    CHECK(std::abs(r.residual) <= kResidualAcceptance);
  }
  CHECK(one.eigenvalues[1].energy.real() == doctest::Approx(4.1092287).epsilon(1e-7));

  const SpectrumReport two = spectrum(make_spec(2, 0, 0, 12));
  REQUIRE(two.eigenvalues.size() >= 2);
  for (const auto& r : two.eigenvalues) {
    CHECK(r.classified_real);
    CHECK(r.energy.real() > 0.0);
  }
}

TEST_CASE("eigenvalues do not depend on the contour radius") {
  ProblemSpec a = make_spec(1, 0, 0, 12);
  ProblemSpec b = a;
  b.decay_target = 40.0;
  const std::vector<double> ea = real_parts(spectrum(a));
  const std::vector<double> eb = real_parts(spectrum(b));
  REQUIRE(ea.size() == eb.size());
  for (std::size_t k = 0; k < ea.size(); ++k) CHECK(std::abs(ea[k] - eb[k]) < 1e-8 * ea[k]);
}

TEST_CASE("fixed-step eigenvalues are step-size independent") {
  ProblemSpec a = make_spec(1, 0, 0, 5);
  a.step = StepControl::fixed(2e-3);
  ProblemSpec b = a;
  b.step = StepControl::fixed(1e-3);
  const std::vector<Bracket> br = scan(a);
  REQUIRE(br.size() == 2);
  for (const Bracket& k : br) {
    const cplx ea = refine(a, k).energy;
    const cplx eb = refine(b, k).energy;
    CHECK(std::abs(ea - eb) < 1e-8 * std::abs(eb));
    // Richardson: the h/2 error is 1/16 of the difference.
    CHECK(std::abs(ea - eb) / 15.0 < 1e-9 * std::abs(eb));
  }
}

TEST_CASE("wedge choice flips the oscillator spectrum") {
  const std::vector<double> up = real_parts(spectrum(make_spec(0, 0, 0, 8)));
  const std::vector<double> down = real_parts(spectrum(make_spec(0, 1, -8, 0)));
  REQUIRE(up.size() == 4);
  REQUIRE(down.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(up[k] + down[3 - k]) < 1e-9);
}

TEST_CASE("lowest_levels extends the window") {
  const SpectrumReport r = lowest_levels(make_spec(0, 0, 0, 4), 8);
  const std::vector<double> e = real_parts(r);
  REQUIRE(e.size() == 8);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(e[k] - (2 * k + 1)) < 1e-8);
}

TEST_CASE("levels stay resolvable at high energy") {
  // Two consecutive levels near E ≈ 150 at ε = 1, where the matching
  // vertex must sit between the turning points to keep W well conditioned.
  const SpectrumReport r = spectrum(make_spec(1, 0, 140, 156));
  REQUIRE(r.eigenvalues.size() >= 2);
  for (const auto& e : r.eigenvalues) {
    CHECK(e.classified_real);
    CHECK(std::abs(e.residual) <= kResidualAcceptance);
  }
  // Leading WKB estimate E_n ≈ [Γ(3/2 + 1/3)·√π·(n + 1/2)/(sin(π/3)·Γ(1 + 1/3))]^{6/5}.
  const double c = std::tgamma(1.5 + 1.0 / 3) * std::sqrt(kPi) /
                   (std::sin(kPi / 3) * std::tgamma(1.0 + 1.0 / 3));
  const double e0 = r.eigenvalues.front().energy.real();
  const double n = std::pow(e0, 5.0 / 6.0) / c - 0.5;
  CHECK(std::abs(n - std::round(n)) < 0.01);
}

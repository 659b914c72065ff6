#include "ptspectra/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>

#include "ptspectra/analysis.hpp"
#include "ptspectra/error.hpp"
#include "ptspectra/hobasis.hpp"
#include "ptspectra/output.hpp"
#include "ptspectra/shooting.hpp"
#include "ptspectra/wedges.hpp"

namespace ptspectra::cli {

namespace {

using nlohmann::json;

struct OutputOptions {
  std::string format = "csv";
  std::string out;  // empty: stdout
};

void add_output_flags(CLI::App* sub, OutputOptions& o) {
  sub->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--out", o.out, "Output path (default: stdout)");
}

/// Sink for --out, or the caller's stream.
class Sink {
 public:
  Sink(const OutputOptions& o, std::ostream& fallback) : stream_(&fallback) {
    if (!o.out.empty()) {
      file_ = std::make_unique<std::ofstream>(o.out, std::ios::binary);
      if (!*file_) throw IoError("cannot open output file '" + o.out + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void write_json(const json& j, std::ostream& os) {
  os << j.dump(2) << '\n';
  os.flush();
  if (!os) throw IoError("write failed on output sink");
}

void warn_branch_range(double epsilon, std::ostream& err) {
  if (outside_validated_branch_range(epsilon))
    err << "warning: epsilon > 4: contour arms approach the cut of the principal "
           "power (ix)^epsilon; results are not validated\n";
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw DomainError("epsilon must be finite and >= 0");
}

// --- wedges ------------------------------------------------------------------

struct WedgesArgs {
  double epsilon = 0.0;
  int branch = 0;
  double energy_hint = 1.0;
  double decay_target = kDefaultDecayTarget;
  std::string svg;
  OutputOptions out;
};

int run_wedges(const WedgesArgs& a, std::ostream& out, std::ostream& err) {
  check_epsilon(a.epsilon);
  warn_branch_range(a.epsilon, err);
  const WedgePair pair = wedge_geometry(a.epsilon, a.branch);
  const Contour contour = plan_contour(pair, a.energy_hint, a.decay_target);

  if (!a.svg.empty()) {
    std::ofstream svg(a.svg, std::ios::binary);
    if (!svg) throw IoError("cannot open SVG file '" + a.svg + "'");
    emit_wedge_svg(pair, contour, svg);
  }

  Sink sink(a.out, out);
  const StokesWedge* sides[2] = {&pair.left, &pair.right};
  const cplx ends[2] = {contour.left_end(), contour.right_end()};
  const char* names[2] = {"left", "right"};
  constexpr double kDeg = 180.0 / kPi;
  if (a.out.format == "json") {
    json wedges = json::array();
    for (int i = 0; i < 2; ++i)
      wedges.push_back({{"side", names[i]},
                        {"center_deg", round12(sides[i]->center * kDeg)},
                        {"half_opening_deg", round12(sides[i]->half_opening * kDeg)},
                        {"opening_deg", round12(sides[i]->opening() * kDeg)},
                        {"end_re", round12(ends[i].real())},
                        {"end_im", round12(ends[i].imag())}});
    write_json({{"meta",
                 {{"epsilon", round12(a.epsilon)},
                  {"branch", a.branch},
                  {"energy_hint", round12(a.energy_hint)},
                  {"decay_target", round12(a.decay_target)},
                  {"contour_radius", round12(contour.right_radius)}}},
                {"wedges", wedges}},
               sink.get());
  } else {
    std::ostream& os = sink.get();
    os << "side,epsilon,branch,center_deg,half_opening_deg,opening_deg,radius,end_re,end_im\n";
    for (int i = 0; i < 2; ++i)
      os << names[i] << ',' << format_number(a.epsilon) << ',' << a.branch << ','
         << format_number(sides[i]->center * kDeg) << ','
         << format_number(sides[i]->half_opening * kDeg) << ','
         << format_number(sides[i]->opening() * kDeg) << ','
         << format_number(contour.right_radius) << ',' << format_number(ends[i].real()) << ','
         << format_number(ends[i].imag()) << '\n';
    os.flush();
    if (!os) throw IoError("write failed on output sink");
  }
  return kOk;
}

// --- shoot -------------------------------------------------------------------

struct ShootArgs {
  double epsilon = 0.0;
  int branch = 0;
  double emin = 0.0;
  double emax = 12.0;
  std::size_t grid = 0;
  std::size_t levels = 0;
  double decay_target = kDefaultDecayTarget;
  std::string step_mode = "adaptive";
  double h = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 1'000'000;
  OutputOptions out;
};

StepControl make_step(const std::string& mode, double h, double rtol, double atol,
                      std::size_t max_steps) {
  StepControl c = mode == "fixed" ? StepControl::fixed(h) : StepControl::adaptive(rtol, atol);
  c.max_steps = max_steps;
  c.validate();
  return c;
}

int run_shoot(const ShootArgs& a, std::ostream& out, std::ostream& err) {
  check_epsilon(a.epsilon);
  warn_branch_range(a.epsilon, err);
  ProblemSpec spec;
  spec.epsilon = a.epsilon;
  spec.branch = a.branch;
  spec.e_min = a.emin;
  spec.e_max = a.emax;
  spec.grid = a.grid;
  spec.decay_target = a.decay_target;
  spec.step = make_step(a.step_mode, a.h, a.rtol, a.atol, a.max_steps);
  spec.validate();

  const SpectrumReport report = a.levels > 0 ? lowest_levels(spec, a.levels) : spectrum(spec);
  for (const SpuriousBracket& s : report.spurious)
    err << "note: spurious bracket [" << format_number(s.bracket.lo) << ", "
        << format_number(s.bracket.hi) << "]: " << s.reason << '\n';

  const std::vector<SpectrumRow> rows = shooting_rows(a.epsilon, a.branch, report.eigenvalues);
  Sink sink(a.out, out);
  if (a.out.format == "json") {
    json spurious = json::array();
    for (const SpuriousBracket& s : report.spurious)
      spurious.push_back(
          {{"lo", round12(s.bracket.lo)}, {"hi", round12(s.bracket.hi)}, {"reason", s.reason}});
    const double hint = std::max(std::abs(a.emin), std::abs(a.emax));
    json meta = {{"epsilon", round12(a.epsilon)},
                 {"branch", a.branch},
                 {"e_min", round12(a.emin)},
                 {"e_max", round12(a.emax)},
                 {"grid", spec.grid_points()},
                 {"levels", a.levels},
                 {"decay_target", round12(a.decay_target)},
                 {"scan_contour_radius",
                  round12(contour_radius(a.epsilon, hint, a.decay_target))},
                 {"step_mode", a.step_mode},
                 {"step", spec.step.describe()},
                 {"rel_tol", round12(spec.step.rel_tol)},
                 {"abs_tol", round12(spec.step.abs_tol)},
                 {"residual_threshold", kResidualAcceptance},
                 {"spurious", spurious}};
    write_json(spectrum_json(rows, meta), sink.get());
  } else {
    emit_spectrum_csv(rows, sink.get());
  }
  return kOk;
}

// --- truncate ----------------------------------------------------------------

struct TruncateArgs {
  int epsilon = 1;
  std::size_t n = 20;
  std::vector<std::size_t> trace;
  std::size_t k = 6;
  double tol = 1e-3;
  std::string matrix;
  OutputOptions out;
};

int run_truncate(const TruncateArgs& a, std::ostream& out, std::ostream&) {
  const TruncatedHamiltonian h = build_truncation(a.epsilon, a.n);
  if (!a.matrix.empty()) {
    std::ofstream m(a.matrix, std::ios::binary);
    if (!m) throw IoError("cannot open matrix file '" + a.matrix + "'");
    emit_matrix_csv(h.entries, m);
  }
  const SpectrumSet s = eigenvalues(
      h.entries, "truncation eps=" + std::to_string(a.epsilon) + " N=" + std::to_string(a.n));
  const std::vector<SpectrumRow> rows = truncation_rows(a.epsilon, a.n, s);
  const PairAudit audit = conjugate_pair_audit(s);

  std::optional<StabilizationTrace> trace;
  if (!a.trace.empty()) trace = stabilization_trace(a.epsilon, a.trace, a.k);

  Sink sink(a.out, out);
  if (a.out.format == "json") {
    json meta = {{"epsilon", a.epsilon},
                 {"N", a.n},
                 {"pt_signature", pt_signature_check(h)},
                 {"hermiticity_defect", round12(hermiticity_defect(h.entries))},
                 {"real_count", audit.real_count},
                 {"pair_count", audit.pair_count},
                 {"unpaired_count", audit.unpaired.size()}};
    json j = spectrum_json(rows, meta);
    if (trace) {
      j["trace"] = trace_json(*trace);
      if (trace->levels.size() >= 3) j["settled_count"] = settled_count(*trace, a.tol);
      j["settle_tolerance"] = round12(a.tol);
    }
    write_json(j, sink.get());
  } else if (trace) {
    emit_trace_csv(*trace, sink.get());
  } else {
    emit_spectrum_csv(rows, sink.get());
  }
  return kOk;
}

// --- compare -----------------------------------------------------------------

struct CompareArgs {
  int epsilon = 1;
  std::size_t levels = 6;
  std::size_t nmax = 100;
  double tol = 1e-3;
  OutputOptions out;
};

int run_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  warn_branch_range(a.epsilon, err);
  CompareOptions opts;
  opts.settle_tolerance = a.tol;
  const ComparisonReport r = compare_methods(a.epsilon, a.levels, a.nmax, opts);
  if (!r.basis_valid) err << "note: " << r.note << '\n';
  Sink sink(a.out, out);
  if (a.out.format == "json") {
    json j = comparison_json(r);
    j["meta"] = {{"settle_tolerance", round12(a.tol)},
                 {"step", opts.step.describe()},
                 {"decay_target", round12(opts.decay_target)},
                 {"n_ladder", r.trace.n_values}};
    write_json(j, sink.get());
  } else {
    emit_comparison_csv(r, sink.get());
  }
  return kOk;
}

// --- wkbfit ------------------------------------------------------------------

struct WkbfitArgs {
  std::string in;
  int from = 10;
  int to = 30;
  std::string method = "shooting";
  OutputOptions out;
};

int run_wkbfit(const WkbfitArgs& a, std::ostream& out, std::ostream&) {
  std::vector<SpectrumRow> rows;
  if (a.in == "-") {
    rows = read_spectrum_csv(std::cin);
  } else {
    std::ifstream f(a.in, std::ios::binary);
    if (!f) throw IoError("cannot open spectrum CSV '" + a.in + "'");
    rows = read_spectrum_csv(f);
  }
  std::vector<Level> levels;
  for (const SpectrumRow& r : rows)
    if (r.method == a.method) levels.push_back({static_cast<int>(r.index), r.energy.real()});
  const GrowthFit fit = wkb_growth_fit(levels, a.from, a.to);

  Sink sink(a.out, out);
  if (a.out.format == "json") {
    write_json({{"slope", round12(fit.slope)},
                {"std_error", round12(fit.std_error)},
                {"intercept", round12(fit.intercept)},
                {"points", fit.points},
                {"n_from", a.from},
                {"n_to", a.to},
                {"method", a.method}},
               sink.get());
  } else {
    std::ostream& os = sink.get();
    os << "slope,std_error,intercept,points,n_from,n_to\n"
       << format_number(fit.slope) << ',' << format_number(fit.std_error) << ','
       << format_number(fit.intercept) << ',' << fit.points << ',' << a.from << ',' << a.to
       << '\n';
    os.flush();
    if (!os) throw IoError("write failed on output sink");
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of H = p^2 + x^2 (ix)^epsilon: complex-contour shooting and "
               "oscillator-basis truncation diagnostics",
               "pt-spectra"};
  app.require_subcommand(1);

  WedgesArgs wa;
  auto* wedges = app.add_subcommand("wedges", "Stokes wedge geometry and integration contour");
  wedges->add_option("--epsilon", wa.epsilon, "Deformation parameter (>= 0)")->required();
  wedges->add_option("--branch", wa.branch, "Wedge-pair rotation index")->capture_default_str();
  wedges->add_option("--energy-hint", wa.energy_hint, "Energy used to size the contour")
      ->capture_default_str();
  wedges->add_option("--decay-target", wa.decay_target, "WKB exponent at contour ends")
      ->capture_default_str();
  wedges->add_option("--svg", wa.svg, "Write an SVG diagram to this path");
  add_output_flags(wedges, wa.out);

  ShootArgs sa;
  auto* shoot = app.add_subcommand("shoot", "Eigenvalues by complex-contour shooting");
  shoot->add_option("--epsilon", sa.epsilon, "Deformation parameter (>= 0)")->required();
  shoot->add_option("--branch", sa.branch, "Wedge-pair rotation index")->capture_default_str();
  shoot->add_option("--emin", sa.emin, "Lower end of the energy window")->capture_default_str();
  shoot->add_option("--emax", sa.emax, "Upper end of the energy window")->capture_default_str();
  shoot->add_option("--grid", sa.grid, "Scan grid points (0 = auto)")->capture_default_str();
  shoot->add_option("--levels", sa.levels,
                    "Return the lowest LEVELS eigenvalues, extending the window as needed")
      ->capture_default_str();
  shoot->add_option("--decay-target", sa.decay_target, "WKB exponent at contour ends")
      ->capture_default_str();
  shoot->add_option("--step-mode", sa.step_mode, "Runge-Kutta mode")
      ->check(CLI::IsMember({"adaptive", "fixed"}))
      ->capture_default_str();
  shoot->add_option("--step", sa.h, "Fixed RK4 step")->capture_default_str();
  shoot->add_option("--rtol", sa.rtol, "Adaptive relative tolerance")->capture_default_str();
  shoot->add_option("--atol", sa.atol, "Adaptive absolute tolerance")->capture_default_str();
  shoot->add_option("--max-steps", sa.max_steps, "Step budget per integration")
      ->capture_default_str();
  add_output_flags(shoot, sa.out);

  TruncateArgs ta;
  auto* truncate = app.add_subcommand("truncate", "Oscillator-basis truncation eigenvalues");
  truncate->add_option("--epsilon", ta.epsilon, "One of 0, 1, 2, 4, 6")->required();
  truncate->add_option("--n", ta.n, "Matrix dimension")->capture_default_str();
  truncate->add_option("--trace", ta.trace, "Stabilization trace over these N values")
      ->delimiter(',');
  truncate->add_option("--k", ta.k, "Levels per trace row")->capture_default_str();
  truncate->add_option("--tol", ta.tol, "Settle tolerance for the trace")->capture_default_str();
  truncate->add_option("--matrix", ta.matrix, "Write the matrix entries as CSV to this path");
  add_output_flags(truncate, ta.out);

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Shooting versus truncation report");
  compare->add_option("--epsilon", ca.epsilon, "One of 0, 1, 2, 4, 6")->required();
  compare->add_option("--levels", ca.levels, "Number of levels")->capture_default_str();
  compare->add_option("--nmax", ca.nmax, "Largest truncation size")->capture_default_str();
  compare->add_option("--tol", ca.tol, "Settle tolerance")->capture_default_str();
  add_output_flags(compare, ca.out);

  WkbfitArgs fa;
  auto* wkbfit = app.add_subcommand("wkbfit", "Power-law growth fit from a spectrum CSV");
  wkbfit->add_option("--in", fa.in, "Spectrum CSV ('-' for stdin)")->required();
  wkbfit->add_option("--from", fa.from, "First level index")->capture_default_str();
  wkbfit->add_option("--to", fa.to, "Last level index")->capture_default_str();
  wkbfit->add_option("--method", fa.method, "Rows to use")->capture_default_str();
  add_output_flags(wkbfit, fa.out);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("pt-spectra");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  // Help of the subcommand being parsed, if any.
  auto help_text = [&] {
    for (const CLI::App* sub : app.get_subcommands()) return sub->help();
    return app.help();
  };
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << help_text();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << help_text();
    return kUsageError;
  }

  try {
    if (*wedges) return run_wedges(wa, out, err);
    if (*shoot) return run_shoot(sa, out, err);
    if (*truncate) return run_truncate(ta, out, err);
    if (*compare) return run_compare(ca, out, err);
    if (*wkbfit) return run_wkbfit(fa, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace ptspectra::cli

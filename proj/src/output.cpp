#include "ptspectra/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ptspectra/error.hpp"

namespace ptspectra {

namespace {

void check_sink(const std::ostream& sink) {
  if (!sink) throw IoError("write failed on output sink");
}

std::string opt_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

double parse_double(const std::string& s, const char* column) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw UsageError(std::string("spectrum CSV: malformed ") + column + " value '" + s + "'");
  return v;
}

nlohmann::json complex_json(cplx z) {
  return {{"re", round12(z.real())}, {"im", round12(z.imag())}};
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

double round12(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

std::vector<SpectrumRow> shooting_rows(double epsilon, int branch,
                                       std::span<const ShootingResult> results) {
  std::vector<SpectrumRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i) {
    SpectrumRow r;
    r.method = "shooting";
    r.epsilon = epsilon;
    r.branch = branch;
    r.index = i;
    r.energy = results[i].energy;
    r.residual = std::abs(results[i].residual);
    rows.push_back(r);
  }
  return rows;
}

std::vector<SpectrumRow> truncation_rows(int epsilon, std::size_t n, const SpectrumSet& s) {
  std::vector<SpectrumRow> rows;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    SpectrumRow r;
    r.method = "truncation";
    r.epsilon = epsilon;
    r.index = i;
    r.energy = s.values[i];
    r.n = n;
    rows.push_back(r);
  }
  return rows;
}

void emit_spectrum_csv(std::span<const SpectrumRow> rows, std::ostream& sink) {
  sink << kSpectrumCsvHeader << '\n';
  for (const SpectrumRow& r : rows) {
    sink << r.method << ',' << format_number(r.epsilon) << ','
         << (r.branch ? std::to_string(*r.branch) : "") << ',' << r.index << ','
         << format_number(r.energy.real()) << ',' << format_number(r.energy.imag()) << ','
         << opt_number(r.residual) << ',' << (r.n ? std::to_string(*r.n) : "") << '\n';
  }
  sink.flush();
  check_sink(sink);
}

nlohmann::json spectrum_json(std::span<const SpectrumRow> rows, const nlohmann::json& meta) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SpectrumRow& r : rows) {
    nlohmann::json j;
    j["method"] = r.method;
    j["epsilon"] = round12(r.epsilon);
    j["branch"] = r.branch ? nlohmann::json(*r.branch) : nlohmann::json(nullptr);
    j["index"] = r.index;
    j["re_E"] = round12(r.energy.real());
    j["im_E"] = round12(r.energy.imag());
    j["residual"] = r.residual ? nlohmann::json(round12(*r.residual)) : nlohmann::json(nullptr);
    j["N"] = r.n ? nlohmann::json(*r.n) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return {{"meta", meta}, {"rows", arr}};
}

std::vector<SpectrumRow> read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("spectrum CSV: empty input");
  const std::vector<std::string> header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : {"method", "epsilon", "branch", "index", "re_E", "im_E", "residual", "N"})
    if (!col.count(name)) throw UsageError(std::string("spectrum CSV: missing column ") + name);

  std::vector<SpectrumRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) throw UsageError("spectrum CSV: ragged row '" + line + "'");
    SpectrumRow r;
    r.method = f[col["method"]];
    r.epsilon = parse_double(f[col["epsilon"]], "epsilon");
    if (!f[col["branch"]].empty())
      r.branch = static_cast<int>(parse_double(f[col["branch"]], "branch"));
    r.index = static_cast<std::size_t>(parse_double(f[col["index"]], "index"));
    r.energy = {parse_double(f[col["re_E"]], "re_E"), parse_double(f[col["im_E"]], "im_E")};
    if (!f[col["residual"]].empty()) r.residual = parse_double(f[col["residual"]], "residual");
    if (!f[col["N"]].empty()) r.n = static_cast<std::size_t>(parse_double(f[col["N"]], "N"));
    rows.push_back(r);
  }
  return rows;
}

void emit_trace_csv(const StabilizationTrace& trace, std::ostream& sink) {
  sink << "epsilon,N,level,re_E,im_E\n";
  for (std::size_t row = 0; row < trace.n_values.size(); ++row)
    for (std::size_t l = 0; l < trace.levels[row].size(); ++l)
      sink << trace.epsilon << ',' << trace.n_values[row] << ',' << l << ','
           << format_number(trace.levels[row][l].real()) << ','
           << format_number(trace.levels[row][l].imag()) << '\n';
  sink.flush();
  check_sink(sink);
}

nlohmann::json trace_json(const StabilizationTrace& trace) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t row = 0; row < trace.n_values.size(); ++row) {
    nlohmann::json levels = nlohmann::json::array();
    for (const cplx& e : trace.levels[row]) levels.push_back(complex_json(e));
    rows.push_back({{"N", trace.n_values[row]}, {"levels", levels}});
  }
  return {{"epsilon", trace.epsilon}, {"k", trace.k}, {"rows", rows}};
}

void emit_comparison_csv(const ComparisonReport& r, std::ostream& sink) {
  sink << "epsilon,N_max,settled_count,basis_valid,index,shoot_re,shoot_im,trunc_re,trunc_im,"
          "abs_dev,rel_dev,verdict\n";
  for (std::size_t l = 0; l < r.verdicts.size(); ++l) {
    sink << r.epsilon << ',' << r.n_max << ',' << r.settled_count << ','
         << (r.basis_valid ? "true" : "false") << ',' << l << ','
         << format_number(r.shooting[l].real()) << ',' << format_number(r.shooting[l].imag())
         << ',' << format_number(r.truncation[l].real()) << ','
         << format_number(r.truncation[l].imag()) << ',' << format_number(r.abs_deviation[l])
         << ',' << format_number(r.rel_deviation[l]) << ',' << to_string(r.verdicts[l]) << '\n';
  }
  sink.flush();
  check_sink(sink);
}

nlohmann::json comparison_json(const ComparisonReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t l = 0; l < r.verdicts.size(); ++l) {
    levels.push_back({{"index", l},
                      {"shooting", complex_json(r.shooting[l])},
                      {"truncation", complex_json(r.truncation[l])},
                      {"abs_dev", round12(r.abs_deviation[l])},
                      {"rel_dev", round12(r.rel_deviation[l])},
                      {"verdict", std::string(to_string(r.verdicts[l]))}});
  }
  return {{"epsilon", r.epsilon},
          {"N_max", r.n_max},
          {"settle_tolerance", round12(r.settle_tolerance)},
          {"settled_count", r.settled_count},
          {"basis_valid", r.basis_valid},
          {"note", r.note},
          {"levels", levels},
          {"trace", trace_json(r.trace)}};
}

void emit_matrix_csv(const ComplexMatrix& m, std::ostream& sink) {
  sink << "row,col,re,im\n";
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c)
      sink << r << ',' << c << ',' << format_number(m(r, c).real()) << ','
           << format_number(m(r, c).imag()) << '\n';
  sink.flush();
  check_sink(sink);
}

std::string degree_label(double radians) {
  double deg = radians * 180.0 / kPi;
  if (std::abs(deg) < 0.05) deg = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f°", deg);
  return buf;
}

void emit_wedge_svg(const WedgePair& pair, const Contour& contour, std::ostream& sink) {
  constexpr double kSize = 400.0, kMid = 200.0, kRadius = 140.0;
  auto px = [&](double re) { return format_number(kMid + kRadius * re); };
  auto py = [&](double im) { return format_number(kMid - kRadius * im); };

  sink << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\""
       << kSize << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  sink << "  <title>Stokes wedges, epsilon=" << format_number(pair.epsilon)
       << " branch=" << pair.branch << "</title>\n";
  sink << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  sink << "  <line x1=\"" << px(-1.3) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1.3)
       << "\" y2=\"" << py(0) << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
  sink << "  <line x1=\"" << px(0) << "\" y1=\"" << py(-1.3) << "\" x2=\"" << px(0)
       << "\" y2=\"" << py(1.3) << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
  sink << "  <circle cx=\"" << kMid << "\" cy=\"" << kMid << "\" r=\"" << kRadius
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  for (const auto* w : {&pair.left, &pair.right}) {
    const double a1 = w->center - w->half_opening;
    const double a2 = w->center + w->half_opening;
    // Counterclockwise in the math plane is sweep-flag 0 once y is flipped.
    sink << "  <path class=\"wedge\" d=\"M " << px(0) << ' ' << py(0) << " L "
         << px(std::cos(a1)) << ' ' << py(std::sin(a1)) << " A " << kRadius << ' ' << kRadius
         << " 0 0 0 " << px(std::cos(a2)) << ' ' << py(std::sin(a2))
         << " Z\" fill=\"#4a90d9\" fill-opacity=\"0.3\" stroke=\"#4a90d9\"/>\n";
    const double lr = 1.18;
    sink << "  <text class=\"center-label\" x=\"" << px(lr * std::cos(w->center)) << "\" y=\""
         << py(lr * std::sin(w->center))
         << "\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\">"
         << degree_label(w->center) << "</text>\n";
  }
  sink << "  <text class=\"opening-label\" x=\"10\" y=\"20\" font-size=\"12\">opening "
       << degree_label(pair.right.opening()) << "</text>\n";

  const double scale = std::max(contour.left_radius, contour.right_radius);
  sink << "  <polyline class=\"contour\" fill=\"none\" stroke=\"#d0021b\" stroke-width=\"2\" "
          "points=\"";
  for (std::size_t i = 0; i < contour.vertices.size(); ++i) {
    const cplx z = scale > 0.0 ? contour.vertices[i] / scale : contour.vertices[i];
    sink << (i ? " " : "") << px(z.real()) << ',' << py(z.imag());
  }
  sink << "\"/>\n</svg>\n";
  sink.flush();
  check_sink(sink);
}

}  // namespace ptspectra

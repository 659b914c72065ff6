#pragma once
// Serialization of results: CSV and JSON spectra, comparison reports and
// SVG wedge diagrams. Numbers are written with 12 significant digits.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptspectra/analysis.hpp"
#include "ptspectra/eig.hpp"
#include "ptspectra/shooting.hpp"
#include "ptspectra/wedges.hpp"

namespace ptspectra {

/// printf("%.12g")
std::string format_number(double v);

/// v rounded to 12 significant digits.
double round12(double v);

struct SpectrumRow {
  std::string method;  // "shooting" | "truncation"
  double epsilon = 0.0;
  std::optional<int> branch;
  std::size_t index = 0;
  cplx energy;
  std::optional<double> residual;
  std::optional<std::size_t> n;
};

inline constexpr const char* kSpectrumCsvHeader = "method,epsilon,branch,index,re_E,im_E,residual,N";

std::vector<SpectrumRow> shooting_rows(double epsilon, int branch,
                                       std::span<const ShootingResult> results);
std::vector<SpectrumRow> truncation_rows(int epsilon, std::size_t n, const SpectrumSet& s);

/// Header plus one row per entry in the given order. Throws IoError when the
/// sink reports failure.
void emit_spectrum_csv(std::span<const SpectrumRow> rows, std::ostream& sink);

nlohmann::json spectrum_json(std::span<const SpectrumRow> rows, const nlohmann::json& meta);

/// Parses CSV written by emit_spectrum_csv. Throws UsageError on a missing
/// header column or malformed number.
std::vector<SpectrumRow> read_spectrum_csv(std::istream& in);

void emit_trace_csv(const StabilizationTrace& trace, std::ostream& sink);
nlohmann::json trace_json(const StabilizationTrace& trace);

void emit_comparison_csv(const ComparisonReport& report, std::ostream& sink);
nlohmann::json comparison_json(const ComparisonReport& report);

/// Re/Im parts of every entry: "row,col,re,im".
void emit_matrix_csv(const ComplexMatrix& m, std::ostream& sink);

/// Degrees with one decimal, e.g. "-18.0°".
std::string degree_label(double radians);

/// Unit-circle frame, shaded wedge sectors, the contour polyline (scaled to
/// the frame) and angle labels.
void emit_wedge_svg(const WedgePair& pair, const Contour& contour, std::ostream& sink);

}  // namespace ptspectra

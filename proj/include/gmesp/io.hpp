#ifndef GMESP_IO_HPP
#define GMESP_IO_HPP

#include <string>

#include "gmesp/fact_bounds.hpp"
#include "gmesp/instance.hpp"
#include "gmesp/matrix_bounds.hpp"
#include "gmesp/report.hpp"

namespace gmesp {

// Shortest text that reads back to the same double (at most 17 significant digits).
std::string format_double(double v);

Mat read_matrix_csv(const std::string& path);
// "matrix coordinate real symmetric" or "matrix array real general".
Mat read_matrix_market(const std::string& path);

// JSON instance: n, s, t, C (row-major list, nested rows, or a path to .csv/.mtx), optional A, b, l, c.
Instance parse_instance(const std::string& text, const std::string& base_dir = ".");
Instance read_instance(const std::string& path);
std::string instance_to_json(const Instance& inst);

// {"x": [...], "X": [[...]]}
RelaxPoint parse_relax_point(const std::string& text, int n);
std::string relax_point_to_json(const RelaxPoint& p);

// Dual point of a matrix relaxation: kind, region, Theta, upsilon, nu, eta, pi, tau, xi, Z, Omega, W.
MatrixDualPoint parse_matrix_dual(const std::string& text, int n);
std::string matrix_dual_to_json(const MatrixDualPoint& d);

std::string report_to_json(const BoundReport& r, double lb);
std::string reports_to_json(const std::vector<BoundReport>& rs, double lb);
std::string report_csv_header();
std::string report_to_csv(const BoundReport& r, double lb);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace gmesp

#endif  // GMESP_IO_HPP

#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ems::io {

// Text matrix format:
//   # comment lines are ignored anywhere
//   rows cols
//   <row 0: cols whitespace-separated decimals>
//   ...
// Values are written with 17 significant digits so a round trip is exact.

Eigen::MatrixXd parse_matrix(std::istream& in, std::string_view source = "<stream>");
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void format_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Locale-independent shortest round-trip representation ("inf"/"-inf"/"nan"
/// for non-finite values).
std::string format_double(double v);
/// Fixed 17-significant-digit representation.
std::string format_double17(double v);
/// Parses a decimal float (scientific notation and inf/nan accepted).
bool parse_double(std::string_view text, double& out);

}  // namespace ems::io

#include "ems/matrix_io.hpp"

#include "ems/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace ems::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void parse_fail(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(Errc::ParseError, std::string(source) + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_double17(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

Eigen::MatrixXd parse_matrix(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  long rows = -1, cols = -1;
  Eigen::MatrixXd m;
  long row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_ws(body);
    if (rows < 0) {
      if (fields.size() != 2) parse_fail(source, line_no, "expected header 'rows cols'");
      auto parse_dim = [&](std::string_view f) {
        long v = 0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || ptr != f.data() + f.size() || v < 0)
          parse_fail(source, line_no, "bad dimension '" + std::string(f) + "'");
        return v;
      };
      rows = parse_dim(fields[0]);
      cols = parse_dim(fields[1]);
      m.resize(rows, cols);
      continue;
    }
    if (row >= rows) parse_fail(source, line_no, "more rows than header declares");
    if (static_cast<long>(fields.size()) != cols)
      parse_fail(source, line_no,
                 "expected " + std::to_string(cols) + " values, got " + std::to_string(fields.size()));
    for (long c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v))
        parse_fail(source, line_no, "bad number '" + std::string(fields[c]) + "'");
      m(row, c) = v;
    }
    ++row;
  }
  if (rows < 0) parse_fail(source, line_no, "missing header");
  if (row != rows)
    parse_fail(source, line_no,
               "header declares " + std::to_string(rows) + " rows, found " + std::to_string(row));
  return m;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return parse_matrix(in, path.string());
}

void format_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double17(m(r, c));
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  format_matrix(out, m);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace ems::io

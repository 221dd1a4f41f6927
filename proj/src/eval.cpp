#include "ems/eval.hpp"

#include "ems/entropy.hpp"
#include "ems/error.hpp"
#include "ems/matrix_io.hpp"
#include "ems/parallel.hpp"
#include "ems/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

namespace ems {

double srer(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& x_hat) {
  if (x.size() != x_hat.size())
    throw Error(Errc::DimensionMismatch,
                "lengths " + std::to_string(x.size()) + " and " + std::to_string(x_hat.size()));
  const double signal = x.squaredNorm();
  if (!(signal >= 1e-30)) throw Error(Errc::ZeroSignal, "SRER of a zero signal");
  const double err = (x - x_hat).squaredNorm();
  if (err < 1e-30 * signal) return kDbCap;
  return std::min(kDbCap, 10.0 * std::log10(signal / err));
}

double psnr(const GrayImage& img, const GrayImage& img_hat) {
  if (img.width != img_hat.width || img.height != img_hat.height || img.pixels.size() != img_hat.pixels.size())
    throw Error(Errc::DimensionMismatch, "image sizes differ");
  if (img.pixels.empty()) throw Error(Errc::InvalidSize, "empty image");
  double sse = 0.0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double d = static_cast<double>(img.pixels[i]) - static_cast<double>(img_hat.pixels[i]);
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(img.pixels.size());
  if (mse < 1e-12) return kDbCap;
  return std::min(kDbCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::ems: return "ems";
    case Method::gaussian: return "gaussian";
    case Method::row_orthonormal: return "row_orthonormal";
    case Method::basis_rows: return "basis_rows";
  }
  return "unknown";
}

std::string_view to_string(Solver s) noexcept {
  switch (s) {
    case Solver::omp: return "omp";
    case Solver::basis_pursuit: return "bp";
    case Solver::bpdn: return "bpdn";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "ems") return Method::ems;
  if (name == "gaussian" || name == "random") return Method::gaussian;
  if (name == "row_orthonormal") return Method::row_orthonormal;
  if (name == "basis_rows") return Method::basis_rows;
  throw Error(Errc::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

Solver parse_solver(std::string_view name) {
  if (name == "omp") return Solver::omp;
  if (name == "bp" || name == "basis_pursuit") return Solver::basis_pursuit;
  if (name == "bpdn") return Solver::bpdn;
  throw Error(Errc::InvalidArgument, "unknown solver '" + std::string(name) + "'");
}

void SweepTable::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.method, a.m, a.k, a.snr_db) < std::tie(b.method, b.m, b.k, b.snr_db);
  });
}

SensingDesign build_sensing(Method method, const SignalMatrix& train, const SparsifyingBasis& basis,
                            Eigen::Index m, const SweepOptions& opts) {
  const Eigen::Index n = basis.size();
  const std::uint64_t seed = derive_seed(opts.seed, static_cast<std::uint64_t>(m));
  switch (method) {
    case Method::ems: return ems_train(train.data, basis, m, opts.design).design;
    case Method::gaussian: return make_design(random_gaussian_matrix(m, n, seed), basis);
    case Method::row_orthonormal: return make_design(init_sensing_matrix(m, n, seed), basis);
    case Method::basis_rows:
      if (m < 1 || m > n) throw Error(Errc::InvalidShape, "basis_rows needs 1 <= m <= n");
      return make_design(basis.matrix().transpose().topRows(m), basis);
  }
  throw Error(Errc::InvalidArgument, "unknown method");
}

RecoveryResult recover(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y,
                       Solver solver, Eigen::Index k, const RecoveryConfig& cfg, double noise_sigma) {
  switch (solver) {
    case Solver::omp: return omp(a, y, std::clamp<Eigen::Index>(k, 1, a.rows()));
    case Solver::basis_pursuit: return basis_pursuit(a, y, cfg);
    case Solver::bpdn: {
      double lambda = cfg.lambda;
      if (!(lambda > 0.0)) {
        lambda = noise_sigma > 0.0 ? universal_lambda(noise_sigma, a.cols())
                                   : 1e-4 * (a.transpose() * y).cwiseAbs().maxCoeff();
      }
      return bpdn(a, y, lambda, cfg);
    }
  }
  throw Error(Errc::InvalidArgument, "unknown solver");
}

std::vector<double> recovery_srer(const SensingDesign& design, const SparsifyingBasis& basis,
                                  const SignalMatrix& test, Solver solver, Eigen::Index k, double snr_db,
                                  const SweepOptions& opts, std::uint64_t noise_seed) {
  if (test.n() != design.n || basis.size() != design.n)
    throw Error(Errc::DimensionMismatch, "test signals, basis and design disagree on N");
  std::vector<double> out(static_cast<std::size_t>(test.l()));
  parallel_for(out.size(), [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    const Eigen::VectorXd x = test.data.col(col);
    Eigen::VectorXd sensed = x;
    double sigma = 0.0;
    if (std::isfinite(snr_db)) {
      sensed = add_awgn(x, snr_db, derive_seed(noise_seed, j));
      sigma = (sensed - x).norm() / std::sqrt(static_cast<double>(x.size()));
    }
    const Eigen::VectorXd y = design.phi * sensed;
    const auto res = recover(design.a, y, solver, k, opts.recovery, sigma);
    out[j] = srer(x, basis.synthesize(res.coeffs));
  });
  return out;
}

namespace {

SweepRow summarize(const std::vector<double>& values, bool linear) {
  SweepRow row;
  row.n_signals = static_cast<long>(values.size());
  if (values.empty()) return row;
  const double count = static_cast<double>(values.size());
  if (linear) {
    double lin = 0.0;
    for (double v : values) lin += std::pow(10.0, v / 10.0);
    row.mean_srer_db = std::min(kDbCap, 10.0 * std::log10(lin / count));
  } else {
    row.mean_srer_db = std::accumulate(values.begin(), values.end(), 0.0) / count;
  }
  double ss = 0.0;
  const double mean_db = std::accumulate(values.begin(), values.end(), 0.0) / count;
  for (double v : values) ss += (v - mean_db) * (v - mean_db);
  row.std_srer_db = values.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  return row;
}

std::uint64_t snr_key(double snr) { return std::bit_cast<std::uint64_t>(snr); }

}  // namespace

SyntheticSplit synthetic_split(Eigen::Index n, Eigen::Index k, Eigen::Index train_l, Eigen::Index test_l,
                               const SparsifyingBasis& basis, std::uint64_t seed, AmplitudeDist dist) {
  const auto kk = static_cast<std::uint64_t>(k);
  return {gen_sparse_signals(n, k, train_l, basis, derive_seed(seed, 1, kk), dist),
          gen_sparse_signals(n, k, test_l, basis, derive_seed(seed, 2, kk), dist)};
}

SweepTable sweep_noise(const SignalMatrix& train, const SignalMatrix& test, const SparsifyingBasis& basis,
                       const std::vector<Eigen::Index>& m_values, Eigen::Index k,
                       const std::vector<double>& snr_values, const SweepOptions& opts) {
  SweepTable table;
  for (Method method : opts.methods) {
    for (Eigen::Index m : m_values) {
      const SensingDesign design = build_sensing(method, train, basis, m, opts);
      for (double snr : snr_values) {
        const auto values = recovery_srer(design, basis, test, opts.solver, k, snr, opts,
                                          derive_seed(opts.seed, 0x6e6f697365ULL, snr_key(snr)));
        SweepRow row = summarize(values, opts.linear_average);
        row.method = std::string(to_string(method));
        row.m = static_cast<long>(m);
        row.k = static_cast<long>(k);
        row.snr_db = snr;
        table.rows.push_back(std::move(row));
      }
    }
  }
  table.sort();
  return table;
}

SweepTable sweep_measurements(const SignalMatrix& train, const SignalMatrix& test, const SparsifyingBasis& basis,
                              const std::vector<Eigen::Index>& m_values, Eigen::Index k,
                              const SweepOptions& opts) {
  return sweep_noise(train, test, basis, m_values, k, {kNoNoise}, opts);
}

SweepTable sweep_sparsity(const SparsitySweepData& data, const SparsifyingBasis& basis, Eigen::Index m,
                          const SweepOptions& opts) {
  std::vector<SignalMatrix> train_parts;
  std::vector<SignalMatrix> tests;
  for (Eigen::Index k : data.k_values) {
    auto split = synthetic_split(data.n, k, data.train_per_k, data.test_per_k, basis, data.seed, data.amplitude);
    train_parts.push_back(std::move(split.train));
    tests.push_back(std::move(split.test));
  }
  const SignalMatrix train = concat(train_parts);

  SweepTable table;
  for (Method method : opts.methods) {
    const SensingDesign design = build_sensing(method, train, basis, m, opts);
    for (std::size_t i = 0; i < data.k_values.size(); ++i) {
      const Eigen::Index k = data.k_values[i];
      const auto values = recovery_srer(design, basis, tests[i], opts.solver, k, kNoNoise, opts,
                                        derive_seed(opts.seed, 0x6e6f697365ULL, static_cast<std::uint64_t>(k)));
      SweepRow row = summarize(values, opts.linear_average);
      row.method = std::string(to_string(method));
      row.m = static_cast<long>(m);
      row.k = static_cast<long>(k);
      table.rows.push_back(std::move(row));
    }
  }
  table.sort();
  return table;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

RipRow rip_row(const Eigen::Ref<const Eigen::MatrixXd>& a, const SignalMatrix& signals,
               const SparsifyingBasis& basis) {
  const Eigen::VectorXd d = empirical_rip_deltas(a, basis.analyze_columns(signals.data));
  RipRow row;
  row.m = static_cast<long>(a.rows());
  row.delta_min = d.minCoeff();
  row.delta_max = d.maxCoeff();
  row.delta_median = median(std::vector<double>(d.data(), d.data() + d.size()));
  return row;
}

std::vector<RipRow> rip_table(const SignalMatrix& train, const SignalMatrix& signals,
                              const SparsifyingBasis& basis, const std::vector<Eigen::Index>& m_values,
                              const DesignConfig& cfg) {
  std::vector<RipRow> rows;
  for (Eigen::Index m : m_values) {
    const auto trained = ems_train(train.data, basis, m, cfg);
    rows.push_back(rip_row(trained.design.a, signals, basis));
  }
  return rows;
}

namespace {

constexpr const char* kCsvHeader = "method,m,k,snr_db,mean_srer_db,std_srer_db,n_signals";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_csv(std::ostream& out, SweepTable table) {
  table.sort();
  out << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << csv_field(r.method) << ',' << r.m << ',' << r.k << ',' << io::format_double(r.snr_db) << ','
        << io::format_double(r.mean_srer_db) << ',' << io::format_double(r.std_srer_db) << ',' << r.n_signals
        << '\n';
  }
}

void write_csv(const SweepTable& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_csv(out, table);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

void write_dat(const SweepTable& table_in, const std::filesystem::path& path) {
  SweepTable table = table_in;
  table.sort();
  auto out = open_out(path);
  out << "# method m k snr_db mean_srer_db std_srer_db n_signals\n";
  for (const auto& r : table.rows) {
    out << r.method << ' ' << r.m << ' ' << r.k << ' ' << io::format_double(r.snr_db) << ' '
        << io::format_double(r.mean_srer_db) << ' ' << io::format_double(r.std_srer_db) << ' ' << r.n_signals
        << '\n';
  }
}

SweepTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(Errc::ParseError, "missing sweep CSV header");
  SweepTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 7 fields");
    SweepRow r;
    r.method = f[0];
    double m = 0, k = 0, n = 0;
    if (!io::parse_double(f[1], m) || !io::parse_double(f[2], k) || !io::parse_double(f[3], r.snr_db) ||
        !io::parse_double(f[4], r.mean_srer_db) || !io::parse_double(f[5], r.std_srer_db) ||
        !io::parse_double(f[6], n))
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number");
    r.m = static_cast<long>(m);
    r.k = static_cast<long>(k);
    r.n_signals = static_cast<long>(n);
    table.rows.push_back(std::move(r));
  }
  return table;
}

void write_rip_csv(const std::vector<RipRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "m,delta_min,delta_max,delta_median\n";
  for (const auto& r : rows)
    out << r.m << ',' << io::format_double(r.delta_min) << ',' << io::format_double(r.delta_max) << ','
        << io::format_double(r.delta_median) << '\n';
}

void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "iteration,avg_entropy\n";
  for (std::size_t i = 0; i < trace.avg_entropy_per_iter.size(); ++i)
    out << (i + 1) << ',' << io::format_double(trace.avg_entropy_per_iter[i]) << '\n';
}

}  // namespace ems

#pragma once

#include "ems/design.hpp"
#include "ems/recovery.hpp"
#include "ems/signals.hpp"
#include "ems/sparsify.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ems {

/// Upper cap for dB metrics when the error vanishes.
inline constexpr double kDbCap = 300.0;

/// 10 log10(sum x^2 / sum (x - x_hat)^2), capped at kDbCap.
double srer(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& x_hat);

/// 10 log10(255^2 / MSE), capped at kDbCap.
double psnr(const GrayImage& img, const GrayImage& img_hat);

enum class Method {
  ems,              // trained entropy-maximising design
  gaussian,         // i.i.d. N(0, 1/M)
  row_orthonormal,  // Gaussian with orthonormalised rows
  basis_rows,       // first M rows of Psi^T, so A = [I_M | 0]
};

enum class Solver { omp, basis_pursuit, bpdn };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(Solver s) noexcept;
Method parse_method(std::string_view name);
Solver parse_solver(std::string_view name);

struct SweepOptions {
  std::vector<Method> methods{Method::ems, Method::gaussian};
  Solver solver = Solver::basis_pursuit;
  DesignConfig design;
  RecoveryConfig recovery;
  std::uint64_t seed = 0;  // baseline matrices and injected noise
  /// Average SRER in the linear domain instead of averaging dB values.
  bool linear_average = false;
};

struct SweepRow {
  std::string method;
  long m = 0;
  long k = 0;
  double snr_db = kNoNoise;
  double mean_srer_db = 0.0;
  double std_srer_db = 0.0;
  long n_signals = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// Orders rows by method, then M, K and SNR ascending.
  void sort();
};

/// Builds the sensing design for one method and M. EMS trains on `train`;
/// baselines draw from a stream derived from (opts.seed, m).
SensingDesign build_sensing(Method method, const SignalMatrix& train, const SparsifyingBasis& basis,
                            Eigen::Index m, const SweepOptions& opts);

/// Measures every test signal (adding noise first when snr_db is finite),
/// recovers coefficients and returns the per-signal SRER against the clean
/// signal. k is the OMP atom budget.
std::vector<double> recovery_srer(const SensingDesign& design, const SparsifyingBasis& basis,
                                  const SignalMatrix& test, Solver solver, Eigen::Index k, double snr_db,
                                  const SweepOptions& opts, std::uint64_t noise_seed = 0);

/// Recovers coefficients for one measurement vector.
RecoveryResult recover(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::VectorXd>& y,
                       Solver solver, Eigen::Index k, const RecoveryConfig& cfg, double noise_sigma = 0.0);

/// Held-out synthetic data: training and test sets come from disjoint seed streams.
struct SyntheticSplit {
  SignalMatrix train;
  SignalMatrix test;
};
SyntheticSplit synthetic_split(Eigen::Index n, Eigen::Index k, Eigen::Index train_l, Eigen::Index test_l,
                               const SparsifyingBasis& basis, std::uint64_t seed,
                               AmplitudeDist dist = AmplitudeDist::unit_normal);

SweepTable sweep_measurements(const SignalMatrix& train, const SignalMatrix& test, const SparsifyingBasis& basis,
                              const std::vector<Eigen::Index>& m_values, Eigen::Index k,
                              const SweepOptions& opts);

struct SparsitySweepData {
  Eigen::Index n = 64;
  std::vector<Eigen::Index> k_values;
  Eigen::Index train_per_k = 200;
  Eigen::Index test_per_k = 100;
  AmplitudeDist amplitude = AmplitudeDist::unit_normal;
  std::uint64_t seed = 0;
};

/// Fixed M, varying K. EMS is trained once on the concatenation of the
/// per-K training sets; each K is tested on its own held-out set.
SweepTable sweep_sparsity(const SparsitySweepData& data, const SparsifyingBasis& basis, Eigen::Index m,
                          const SweepOptions& opts);

/// Noise is added to each test signal before measurement; SRER is computed
/// against the clean signal.
SweepTable sweep_noise(const SignalMatrix& train, const SignalMatrix& test, const SparsifyingBasis& basis,
                       const std::vector<Eigen::Index>& m_values, Eigen::Index k,
                       const std::vector<double>& snr_values, const SweepOptions& opts);

struct RipRow {
  long m = 0;
  double delta_min = 0.0;
  double delta_max = 0.0;
  double delta_median = 0.0;
};

RipRow rip_row(const Eigen::Ref<const Eigen::MatrixXd>& a, const SignalMatrix& signals,
               const SparsifyingBasis& basis);

/// Trains one EMS design per M on `train` and reports the spread of the
/// empirical isometry constants over `signals`.
std::vector<RipRow> rip_table(const SignalMatrix& train, const SignalMatrix& signals,
                              const SparsifyingBasis& basis, const std::vector<Eigen::Index>& m_values,
                              const DesignConfig& cfg);

// CSV / .dat emission. All numbers use the C locale shortest round-trip form.
void write_csv(std::ostream& out, SweepTable table);
void write_csv(const SweepTable& table, const std::filesystem::path& path);
void write_dat(const SweepTable& table, const std::filesystem::path& path);
SweepTable read_csv(std::istream& in);
void write_rip_csv(const std::vector<RipRow>& rows, const std::filesystem::path& path);
void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path);

double median(std::vector<double> v);

}  // namespace ems

// ems: command-line front end (train, sense, recover, sweep, info).

#include "ems/ems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ems;

namespace {

const std::vector<std::string> kSolvers{"omp", "bp", "basis_pursuit", "bpdn"};
const std::vector<std::string> kMethods{"ems", "gaussian", "random", "row_orthonormal", "basis_rows"};

void add_design_options(CLI::App* sub, DesignConfig& cfg, std::string& stage2) {
  sub->add_option("--alpha", cfg.alpha, "Penalty weight on the near-isometry term")->capture_default_str();
  sub->add_option("--delta", cfg.delta, "Allowed isometry defect")->capture_default_str();
  sub->add_option("--zeta", cfg.zeta, "Smoothing constant of the absolute-value relaxation")
      ->capture_default_str();
  sub->add_option("--outer-iters", cfg.outer_iters, "Alternating iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--inner-iters", cfg.inner_max_iters, "Gradient steps per signal in stage I")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--inner-tol", cfg.inner_grad_tol, "Gradient-norm stop for stage I")->capture_default_str();
  sub->add_option("--stage2", stage2, "Stage II fit: closed_form or frobenius")
      ->capture_default_str()
      ->check(CLI::IsMember({"closed_form", "frobenius"}));
  sub->add_flag("--early-stop", cfg.early_stop, "Stop once the average entropy stops changing");
  sub->add_option("--early-stop-tol", cfg.early_stop_tol, "Early-stop threshold on |change|")
      ->capture_default_str();
}

void add_recovery_options(CLI::App* sub, RecoveryConfig& cfg) {
  sub->add_option("--max-iters", cfg.max_iters, "Solver iteration cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol", cfg.tol, "Solver tolerance")->capture_default_str();
  sub->add_option("--rho", cfg.rho, "ADMM penalty for basis pursuit")->capture_default_str();
  sub->add_option("--lambda", cfg.lambda, "l1 weight for bpdn (0 picks a default)")->capture_default_str();
}

// Matrix file (N x L), a single PGM image, or a directory of PGM images.
SignalMatrix load_signals(const fs::path& path, int block) {
  auto blocks_of = [block](const fs::path& p) { return image_to_blocks(load_pgm(p), block); };
  if (fs::is_directory(path)) {
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") images.push_back(entry.path());
    std::sort(images.begin(), images.end());
    if (images.empty()) throw Error(Errc::IoError, "no .pgm files in " + path.string());
    std::vector<SignalMatrix> parts;
    for (const auto& p : images) parts.push_back(blocks_of(p));
    return concat(parts);
  }
  if (path.extension() == ".pgm") return blocks_of(path);
  SignalMatrix s;
  s.data = io::read_matrix(path);
  return s;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

fs::path sibling(const fs::path& out, const std::string& name) {
  return out.has_parent_path() ? out.parent_path() / name : fs::path(name);
}

// Fully resolved options of the subcommand that ran; loadable with --config.
void write_sidecar(const CLI::App& sub, const fs::path& out) {
  const fs::path path = sibling(out, out.stem().string() + ".config.ini");
  std::ofstream f(path);
  if (!f) throw Error(Errc::IoError, "cannot write " + path.string());
  f << "[" << sub.get_name() << "]\n" << sub.config_to_str(true, false);
}

std::vector<Eigen::Index> to_index(const std::vector<long>& v) { return {v.begin(), v.end()}; }

void require_grid(const std::vector<long>& grid, const std::string& name, long lo, long hi) {
  if (grid.empty()) throw CLI::ValidationError(name, "grid is empty");
  for (long v : grid)
    if (v < lo || v > hi)
      throw CLI::ValidationError(name, std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                           std::to_string(hi) + "]");
}

struct TrainArgs {
  fs::path data, out = "phi.mat", a_out, trace;
  long m = 0;
  std::string basis = "dct", stage2 = "closed_form";
  int block = 8;
  DesignConfig design;
};

int run_train(const CLI::App& app, TrainArgs& a) {
  a.design.stage2 = parse_stage2(a.stage2);
  const SignalMatrix x = load_signals(a.data, a.block);
  const auto basis = make_basis(a.basis, x.n());
  const TrainResult r = ems_train(x.data, basis, a.m, a.design);
  ensure_parent(a.out);
  io::write_matrix(a.out, r.design.phi);
  io::write_matrix(a.a_out.empty() ? sibling(a.out, "A.mat") : a.a_out, r.design.a);
  write_trace_csv(r.trace, a.trace.empty() ? sibling(a.out, "trace.csv") : a.trace);
  write_sidecar(app, a.out);
  std::cout << "trained " << r.design.m << "x" << r.design.n << " after "
            << r.trace.avg_entropy_per_iter.size() << " iterations, average entropy "
            << io::format_double(r.trace.final_avg_entropy) << "\n";
  return 0;
}

struct SenseArgs {
  fs::path phi, signals, out = "y.mat";
  int block = 8;
};

int run_sense(const SenseArgs& a) {
  const Eigen::MatrixXd phi = io::read_matrix(a.phi);
  const SignalMatrix x = load_signals(a.signals, a.block);
  if (phi.cols() != x.n())
    throw Error(Errc::DimensionMismatch, "Phi has " + std::to_string(phi.cols()) + " columns, signals have length " +
                                             std::to_string(x.n()));
  ensure_parent(a.out);
  io::write_matrix(a.out, phi * x.data);
  return 0;
}

struct RecoverArgs {
  fs::path phi, measurements, truth, out = "xhat.mat", srer_out;
  std::string solver = "bp", basis = "dct";
  long k = 0;
  double noise_sigma = 0.0;
  int block = 8;
  RecoveryConfig recovery;
};

int run_recover(const RecoverArgs& a) {
  const Solver solver = parse_solver(a.solver);
  if (solver == Solver::omp && a.k < 1) throw CLI::ValidationError("--k", "omp needs --k >= 1");
  const Eigen::MatrixXd phi = io::read_matrix(a.phi);
  const Eigen::MatrixXd y = io::read_matrix(a.measurements);
  if (y.rows() != phi.rows())
    throw Error(Errc::DimensionMismatch, "measurements have " + std::to_string(y.rows()) + " rows, Phi has " +
                                             std::to_string(phi.rows()));
  const auto basis = make_basis(a.basis, phi.cols());
  const Eigen::MatrixXd amat = phi * basis.matrix();

  Eigen::MatrixXd xhat(phi.cols(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const auto r = recover(amat, y.col(j), solver, a.k, a.recovery, a.noise_sigma);
    xhat.col(j) = basis.synthesize(r.coeffs);
  }
  ensure_parent(a.out);
  io::write_matrix(a.out, xhat);

  if (!a.truth.empty()) {
    const SignalMatrix x = load_signals(a.truth, a.block);
    if (x.n() != xhat.rows() || x.l() != xhat.cols())
      throw Error(Errc::DimensionMismatch, "ground truth shape differs from the recovered signals");
    const fs::path path = a.srer_out.empty() ? sibling(a.out, "srer.csv") : a.srer_out;
    std::ofstream f(path);
    if (!f) throw Error(Errc::IoError, "cannot write " + path.string());
    f << "signal,srer_db\n";
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.l(); ++j) {
      const double s = srer(x.data.col(j), xhat.col(j));
      total += s;
      f << j << "," << io::format_double(s) << "\n";
    }
    std::cout << "mean SRER " << io::format_double(total / static_cast<double>(x.l())) << " dB\n";
  }
  return 0;
}

struct SweepArgs {
  std::string kind, solver = "bp", basis = "dct", amplitude = "unit_normal", stage2 = "closed_form";
  std::vector<std::string> methods{"ems", "gaussian"};
  long n = 64, k = 10, m = 20, train = 200, test = 100;
  std::vector<long> m_values{10, 20, 30}, k_values{5, 10, 15};
  std::vector<double> snr{0.0, 5.0, 10.0};
  std::uint64_t seed = 0;
  bool linear_average = false;
  fs::path out = "sweep.csv", dat;
  SweepOptions opts;
};

int run_sweep(const CLI::App& app, SweepArgs& a) {
  if (a.kind == "sparsity") {
    require_grid(a.k_values, "--k-values", 1, a.m);
    require_grid({a.m}, "--m", 1, a.n);
  } else {
    require_grid(a.m_values, "--m-values", 1, a.n);
    require_grid({a.k}, "--k", 1, a.n);
  }
  if (a.kind == "noise" && a.snr.empty()) throw CLI::ValidationError("--snr", "grid is empty");

  SweepOptions& o = a.opts;
  o.design.stage2 = parse_stage2(a.stage2);
  o.solver = parse_solver(a.solver);
  o.seed = a.seed;
  o.linear_average = a.linear_average;
  o.methods.clear();
  for (const auto& name : a.methods) o.methods.push_back(parse_method(name));
  const auto basis = make_basis(a.basis, a.n);
  const AmplitudeDist amp = parse_amplitude(a.amplitude);

  ensure_parent(a.out);
  SweepTable table;
  if (a.kind == "sparsity") {
    SparsitySweepData data;
    data.n = a.n;
    data.k_values = to_index(a.k_values);
    data.train_per_k = a.train;
    data.test_per_k = a.test;
    data.amplitude = amp;
    data.seed = a.seed;
    table = sweep_sparsity(data, basis, a.m, o);
  } else {
    const auto split = synthetic_split(a.n, a.k, a.train, a.test, basis, a.seed, amp);
    if (a.kind == "rip-table") {
      write_rip_csv(rip_table(split.train, split.train, basis, to_index(a.m_values), o.design), a.out);
      write_sidecar(app, a.out);
      return 0;
    }
    if (a.kind == "measurements")
      table = sweep_measurements(split.train, split.test, basis, to_index(a.m_values), a.k, o);
    else
      table = sweep_noise(split.train, split.test, basis, to_index(a.m_values), a.k, a.snr, o);
  }
  write_csv(table, a.out);
  if (!a.dat.empty()) write_dat(table, a.dat);
  write_sidecar(app, a.out);
  return 0;
}

struct InfoArgs {
  fs::path phi, signals;
  std::string basis = "dct";
  int block = 8;
};

int run_info(const InfoArgs& a) {
  const Eigen::MatrixXd phi = io::read_matrix(a.phi);
  const auto basis = make_basis(a.basis, phi.cols());
  const Eigen::MatrixXd amat = phi * basis.matrix();
  const Eigen::Index m = amat.rows();
  std::cout << "shape: " << m << "x" << amat.cols() << "\n";
  std::cout << "row_orthonormality_defect: "
            << io::format_double((amat * amat.transpose() - Eigen::MatrixXd::Identity(m, m)).norm()) << "\n";
  std::cout << "mutual_coherence: " << io::format_double(mutual_coherence(amat)) << "\n";
  if (amat.cols() <= 14) std::cout << "spark: " << spark_bruteforce(amat) << "\n";
  if (a.signals.empty()) return 0;

  const SignalMatrix x = load_signals(a.signals, a.block);
  if (x.n() != amat.cols())
    throw Error(Errc::DimensionMismatch, "signals have length " + std::to_string(x.n()) + ", Phi has " +
                                             std::to_string(amat.cols()) + " columns");
  const Eigen::MatrixXd c = basis.analyze_columns(x.data);
  long in_band = 0, meff_ok = 0;
  double h_c = 0.0;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const auto b = check_bounds(c.col(j), amat * c.col(j));
    in_band += b.entropy_bounds_pass;
    meff_ok += b.meff_cond_pass;
    h_c += b.h_c;
  }
  const double l = static_cast<double>(c.cols());
  const RipRow rip = rip_row(amat, x, basis);
  std::cout << "signals: " << c.cols() << "\n";
  std::cout << "avg_entropy_coeffs: " << io::format_double(h_c / l) << "\n";
  std::cout << "avg_entropy_measurements: " << io::format_double(average_entropy(amat, c)) << "\n";
  std::cout << "entropy_bounds_pass_fraction: " << io::format_double(static_cast<double>(in_band) / l) << "\n";
  std::cout << "meff_condition_pass_fraction: " << io::format_double(static_cast<double>(meff_ok) / l) << "\n";
  std::cout << "rip_delta_min: " << io::format_double(rip.delta_min) << "\n";
  std::cout << "rip_delta_median: " << io::format_double(rip.delta_median) << "\n";
  std::cout << "rip_delta_max: " << io::format_double(rip.delta_max) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-maximising sensing matrix design and sparse recovery"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI file with option defaults (flags on the command line win)");
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Design a sensing matrix from training signals");
  t->add_option("--data", train.data, "Training signals: matrix file, .pgm image or directory of .pgm")
      ->required();
  t->add_option("--m", train.m, "Number of measurements")->required()->check(CLI::PositiveNumber);
  t->add_option("--basis", train.basis, "dct, identity or a basis matrix file")->capture_default_str();
  t->add_option("--seed", train.design.seed, "Random seed")->capture_default_str();
  t->add_option("--out", train.out, "Phi output file")->capture_default_str();
  t->add_option("--a-out", train.a_out, "Effective matrix A output (default A.mat next to --out)");
  t->add_option("--trace", train.trace, "Convergence trace CSV (default trace.csv next to --out)");
  t->add_option("--block", train.block, "Block size for image inputs")->capture_default_str();
  add_design_options(t, train.design, train.stage2);

  SenseArgs sense;
  auto* s = app.add_subcommand("sense", "Measure signals: Y = Phi X");
  s->add_option("--phi", sense.phi, "Sensing matrix file")->required();
  s->add_option("--signals", sense.signals, "Signals: matrix file, .pgm image or directory")->required();
  s->add_option("--out", sense.out, "Measurement output file")->capture_default_str();
  s->add_option("--block", sense.block, "Block size for image inputs")->capture_default_str();

  RecoverArgs rec;
  auto* r = app.add_subcommand("recover", "Recover signals from measurements");
  r->add_option("--phi", rec.phi, "Sensing matrix file")->required();
  r->add_option("--measurements", rec.measurements, "Measurement matrix file (M x L)")->required();
  r->add_option("--solver", rec.solver, "omp, bp or bpdn")->capture_default_str()->check(CLI::IsMember(kSolvers));
  r->add_option("--k", rec.k, "Sparsity budget for omp")->check(CLI::PositiveNumber);
  r->add_option("--noise-sigma", rec.noise_sigma, "Noise level used to pick the bpdn weight")
      ->capture_default_str();
  r->add_option("--basis", rec.basis, "dct, identity or a basis matrix file")->capture_default_str();
  r->add_option("--truth", rec.truth, "Ground-truth signals; enables the SRER report");
  r->add_option("--out", rec.out, "Recovered signals output file")->capture_default_str();
  r->add_option("--srer-out", rec.srer_out, "Per-signal SRER CSV (default srer.csv next to --out)");
  r->add_option("--block", rec.block, "Block size for image inputs")->capture_default_str();
  add_recovery_options(r, rec.recovery);

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run an evaluation sweep on synthetic sparse signals");
  w->add_option("kind", sw.kind, "measurements, sparsity, noise or rip-table")
      ->required()
      ->check(CLI::IsMember({"measurements", "sparsity", "noise", "rip-table"}));
  w->add_option("--n", sw.n, "Signal length")->capture_default_str()->check(CLI::Range(2L, 4096L));
  w->add_option("--k", sw.k, "Sparsity (measurements, noise, rip-table)")->capture_default_str();
  w->add_option("--m", sw.m, "Measurements (sparsity sweep)")->capture_default_str();
  w->add_option("--m-values", sw.m_values, "Measurement grid")->capture_default_str()->delimiter(',');
  w->add_option("--k-values", sw.k_values, "Sparsity grid")->capture_default_str()->delimiter(',');
  w->add_option("--snr", sw.snr, "Input SNR grid in dB (noise sweep)")->capture_default_str()->delimiter(',');
  w->add_option("--methods", sw.methods, "Sensing matrices to compare")
      ->capture_default_str()
      ->delimiter(',')
      ->check(CLI::IsMember(kMethods));
  w->add_option("--solver", sw.solver, "omp, bp or bpdn")->capture_default_str()->check(CLI::IsMember(kSolvers));
  w->add_option("--basis", sw.basis, "dct, identity or a basis matrix file")->capture_default_str();
  w->add_option("--amplitude", sw.amplitude, "Coefficient amplitudes: unit_normal or uniform_pm1")
      ->capture_default_str()
      ->check(CLI::IsMember({"unit_normal", "uniform_pm1"}));
  w->add_option("--train", sw.train, "Training signals (per K for sparsity sweeps)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  w->add_option("--test", sw.test, "Held-out test signals (per K for sparsity sweeps)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  w->add_option("--seed", sw.seed, "Seed for data, baselines and noise")->capture_default_str();
  w->add_option("--design-seed", sw.opts.design.seed, "Seed for the EMS design")->capture_default_str();
  w->add_flag("--linear-average", sw.linear_average, "Average SRER as linear ratios instead of dB");
  w->add_option("--out", sw.out, "CSV output file")->capture_default_str();
  w->add_option("--dat", sw.dat, "Also write a space-delimited .dat file");
  add_design_options(w, sw.opts.design, sw.stage2);
  add_recovery_options(w, sw.opts.recovery);

  InfoArgs info;
  auto* i = app.add_subcommand("info", "Entropy, coherence and isometry diagnostics of a matrix");
  i->add_option("--phi", info.phi, "Sensing matrix file")->required();
  i->add_option("--signals", info.signals, "Signals for the entropy and isometry statistics");
  i->add_option("--basis", info.basis, "dct, identity or a basis matrix file")->capture_default_str();
  i->add_option("--block", info.block, "Block size for image inputs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (t->parsed()) return run_train(*t, train);
    if (s->parsed()) return run_sense(sense);
    if (r->parsed()) return run_recover(rec);
    if (w->parsed()) return run_sweep(*w, sw);
    if (i->parsed()) return run_info(info);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << "Run with --help for more information.\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

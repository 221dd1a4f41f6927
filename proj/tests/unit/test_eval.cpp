#include "doctest.h"
#include "helpers.hpp"

#include "ems/eval.hpp"
#include "ems/parallel.hpp"
#include "ems/rng.hpp"

#include <clocale>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

using namespace ems;

namespace {

std::string csv_of(const SweepTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

SweepOptions quick_options() {
  SweepOptions opts;
  opts.design.outer_iters = 3;
  opts.design.seed = 7;
  opts.seed = 3;
  return opts;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("srer examples") {
  const Eigen::VectorXd x = vec({3, 4});
  CHECK(srer(x, x) == kDbCap);
  CHECK(srer(x, Eigen::VectorXd::Zero(2)) == doctest::Approx(0.0));
  CHECK(std::abs(srer(x, vec({3, 0})) - 1.93820026016112828718) < 1e-14);
  CHECK_ERRC(srer(Eigen::VectorXd::Zero(2), x), Errc::ZeroSignal);
  CHECK_ERRC(srer(x, vec({1, 2, 3})), Errc::DimensionMismatch);
}

TEST_CASE("srer is invariant under joint scaling") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(12), xh(12);
    for (Eigen::Index i = 0; i < 12; ++i) {
      x(i) = rng.normal();
      xh(i) = x(i) + 0.3 * rng.normal();
    }
    for (double beta : {-2.0, 1e-3, 1e4}) CHECK(std::abs(srer(beta * x, beta * xh) - srer(x, xh)) < 1e-10);
  }
}

TEST_CASE("psnr examples") {
  const GrayImage a{8, 8, std::vector<std::uint8_t>(64, 100)};
  CHECK(psnr(a, a) == kDbCap);
  const GrayImage black{8, 8, std::vector<std::uint8_t>(64, 0)};
  const GrayImage white{8, 8, std::vector<std::uint8_t>(64, 255)};
  CHECK(psnr(black, white) == doctest::Approx(0.0));
  GrayImage b = a;
  b.pixels[17] = 101;
  CHECK(std::abs(psnr(a, b) - 66.1926033485179751253) < 1e-12);
  const GrayImage small{4, 4, std::vector<std::uint8_t>(16, 0)};
  CHECK_ERRC(psnr(a, small), Errc::DimensionMismatch);
}

TEST_CASE("names parse and print") {
  CHECK(parse_method("random") == Method::gaussian);
  CHECK(parse_method("ems") == Method::ems);
  CHECK(to_string(Method::row_orthonormal) == "row_orthonormal");
  CHECK(parse_solver("bp") == Solver::basis_pursuit);
  CHECK(parse_solver("basis_pursuit") == Solver::basis_pursuit);
  CHECK(to_string(Solver::bpdn) == "bpdn");
  CHECK_ERRC(parse_method("numax"), Errc::InvalidArgument);
  CHECK_ERRC(parse_solver("cosamp"), Errc::InvalidArgument);
}

TEST_CASE("build_sensing baselines") {
  const auto basis = SparsifyingBasis::dct(16);
  const SignalMatrix none;
  const auto opts = quick_options();
  const auto g = build_sensing(Method::gaussian, none, basis, 6, opts);
  CHECK(g.phi.rows() == 6);
  CHECK(build_sensing(Method::gaussian, none, basis, 6, opts).phi == g.phi);
  const auto r = build_sensing(Method::row_orthonormal, none, basis, 6, opts);
  CHECK((r.a * r.a.transpose() - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
  const auto full = build_sensing(Method::basis_rows, none, basis, 16, opts);
  CHECK((full.a - Eigen::MatrixXd::Identity(16, 16)).norm() < 1e-12);
  CHECK_ERRC(build_sensing(Method::gaussian, none, basis, 16, opts), Errc::InvalidShape);
}

TEST_CASE("recovery_srer adds noise before measuring and scores the clean signal") {
  const auto basis = SparsifyingBasis::dct(16);
  const auto test = gen_sparse_signals(16, 2, 10, basis, 4);
  auto opts = quick_options();
  const auto design = build_sensing(Method::basis_rows, {}, basis, 16, opts);
  // Identity sensing with a full OMP budget returns the noisy signal, so SRER equals the input SNR.
  const auto v = recovery_srer(design, basis, test, Solver::omp, 16, 5.0, opts, 11);
  for (double s : v) CHECK(s == doctest::Approx(5.0).epsilon(1e-6));
  const auto clean = recovery_srer(design, basis, test, Solver::omp, 2, kNoNoise, opts);
  for (double s : clean) CHECK(s == kDbCap);
}

TEST_CASE("sweep_measurements shape, determinism and identity sensing") {
  const auto basis = SparsifyingBasis::dct(32);
  const auto split = synthetic_split(32, 3, 40, 20, basis, 5);
  CHECK(split.train.data != split.test.data.leftCols(20));
  auto opts = quick_options();
  opts.methods = {parse_method("ems"), parse_method("random")};
  const auto table = sweep_measurements(split.train, split.test, basis, {10, 20}, 3, opts);
  REQUIRE(table.rows.size() == 4);
  std::set<std::tuple<std::string, long>> keys;
  for (const auto& r : table.rows) {
    CHECK(r.n_signals == 20);
    CHECK(r.k == 3);
    CHECK(std::isinf(r.snr_db));
    keys.insert({r.method, r.m});
  }
  CHECK(keys.size() == 4);
  CHECK(table.rows.front().method == "ems");
  CHECK(table.rows.front().m == 10);
  CHECK(csv_of(sweep_measurements(split.train, split.test, basis, {10, 20}, 3, opts)) == csv_of(table));

  opts.methods = {Method::basis_rows};
  for (Solver s : {Solver::omp, Solver::basis_pursuit}) {
    opts.solver = s;
    const auto id = sweep_measurements(split.train, split.test, basis, {32}, 3, opts);
    REQUIRE(id.rows.size() == 1);
    CHECK(id.rows[0].mean_srer_db == kDbCap);
    CHECK(id.rows[0].std_srer_db == 0.0);
  }
}

TEST_CASE("sweep_sparsity shape, determinism and identity sensing") {
  const auto basis = SparsifyingBasis::dct(24);
  SparsitySweepData data;
  data.n = 24;
  data.k_values = {1, 3, 5};
  data.train_per_k = 20;
  data.test_per_k = 8;
  data.seed = 2;
  auto opts = quick_options();
  opts.methods = {Method::ems, Method::gaussian};
  const auto t = sweep_sparsity(data, basis, 10, opts);
  REQUIRE(t.rows.size() == 6);
  for (const auto& r : t.rows) {
    CHECK(r.m == 10);
    CHECK(r.n_signals == 8);
  }
  CHECK(csv_of(sweep_sparsity(data, basis, 10, opts)) == csv_of(t));
  opts.methods = {Method::basis_rows};
  opts.solver = Solver::omp;
  for (const auto& r : sweep_sparsity(data, basis, 24, opts).rows) CHECK(r.mean_srer_db == kDbCap);
}

TEST_CASE("sweep_noise shape and determinism") {
  const auto basis = SparsifyingBasis::dct(16);
  const auto split = synthetic_split(16, 2, 30, 10, basis, 8);
  auto opts = quick_options();
  opts.solver = Solver::bpdn;
  const auto t = sweep_noise(split.train, split.test, basis, {8}, 2, {20.0, 3.0, kNoNoise}, opts);
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[0].snr_db == 3.0);
  CHECK(t.rows[1].snr_db == 20.0);
  CHECK(std::isinf(t.rows[2].snr_db));
  CHECK(csv_of(sweep_noise(split.train, split.test, basis, {8}, 2, {20.0, 3.0, kNoNoise}, opts)) == csv_of(t));
  // Sweep output does not depend on the worker count.
  set_max_threads(1);
  const auto one = csv_of(sweep_noise(split.train, split.test, basis, {8}, 2, {3.0}, opts));
  set_max_threads(3);
  const auto three = csv_of(sweep_noise(split.train, split.test, basis, {8}, 2, {3.0}, opts));
  set_max_threads(0);
  CHECK(one == three);
}

TEST_CASE("linear averaging option") {
  const auto basis = SparsifyingBasis::dct(16);
  const auto split = synthetic_split(16, 4, 10, 12, basis, 1);
  auto opts = quick_options();
  opts.methods = {Method::gaussian};
  const auto db = sweep_measurements(split.train, split.test, basis, {6}, 4, opts);
  opts.linear_average = true;
  const auto lin = sweep_measurements(split.train, split.test, basis, {6}, 4, opts);
  // Jensen: the log of the mean ratio is at least the mean of the logs.
  CHECK(lin.rows[0].mean_srer_db >= db.rows[0].mean_srer_db);
  CHECK(lin.rows[0].std_srer_db == db.rows[0].std_srer_db);
}

TEST_CASE("rip rows") {
  const auto basis = SparsifyingBasis::identity(8);
  SignalMatrix s{Eigen::MatrixXd::Zero(8, 3), SignalOrigin::file};
  s.data(0, 0) = 1.0;
  s.data(1, 1) = -2.0;
  s.data(0, 2) = 0.5;
  s.data(1, 2) = 0.5;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 8);
  a(0, 0) = a(1, 1) = 1.0;
  auto row = rip_row(a, s, basis);
  CHECK(row.m == 2);
  CHECK(row.delta_max < 1e-15);
  row = rip_row(Eigen::MatrixXd::Zero(2, 8), s, basis);
  CHECK(row.delta_min == 1.0);
  CHECK(row.delta_median == 1.0);

  const auto dct = SparsifyingBasis::dct(16);
  const auto train = gen_sparse_signals(16, 2, 30, dct, 1);
  DesignConfig cfg;
  cfg.outer_iters = 3;
  const auto rows = rip_table(train, train, dct, {4, 8}, cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].m == 4);
  CHECK(rows[1].m == 8);
  for (const auto& r : rows) {
    CHECK(r.delta_min <= r.delta_median);
    CHECK(r.delta_median <= r.delta_max);
  }
}

TEST_CASE("median") {
  CHECK(median({}) == 0.0);
  CHECK(median({3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}

TEST_CASE("csv emission") {
  SweepTable empty;
  CHECK(csv_of(empty) == "method,m,k,snr_db,mean_srer_db,std_srer_db,n_signals\n");

  SweepTable t;
  t.rows.push_back({"gaussian", 20, 5, kNoNoise, 4.25, 1.5, 100});
  t.rows.push_back({"ems", 20, 5, 3.0, 12.125, 0.1, 100});
  t.rows.push_back({"a,\"quoted\"", 10, 1, -2.5, 1e-7, 0.0, 1});
  t.rows.push_back({"ems", 10, 5, 3.0, 300.0, 0.0, 100});
  const std::string text = csv_of(t);
  CHECK(text ==
        "method,m,k,snr_db,mean_srer_db,std_srer_db,n_signals\n"
        "\"a,\"\"quoted\"\"\",10,1,-2.5,1e-07,0,1\n"
        "ems,10,5,3,300,0,100\n"
        "ems,20,5,3,12.125,0.1,100\n"
        "gaussian,20,5,inf,4.25,1.5,100\n");

  std::istringstream in(text);
  auto back = read_csv(in);
  t.sort();
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i].method == t.rows[i].method);
    CHECK(back.rows[i].m == t.rows[i].m);
    CHECK(back.rows[i].snr_db == t.rows[i].snr_db);
    CHECK(back.rows[i].mean_srer_db == t.rows[i].mean_srer_db);
    CHECK(back.rows[i].n_signals == t.rows[i].n_signals);
  }

  // Decimal points stay '.' whatever the global locale says.
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr) {
    CHECK(csv_of(t) == text);
    std::setlocale(LC_NUMERIC, "C");
  }

  TempDir dir("csv");
  write_csv(t, dir / "t.csv");
  std::ifstream f(dir / "t.csv");
  CHECK(std::string(std::istreambuf_iterator<char>(f), {}) == text);
  write_dat(t, dir / "t.dat");
  std::ifstream d(dir / "t.dat");
  std::string first;
  std::getline(d, first);
  CHECK(first == "# method m k snr_db mean_srer_db std_srer_db n_signals");
  std::getline(d, first);
  CHECK(first == "a,\"quoted\" 10 1 -2.5 1e-07 0 1");
  CHECK_ERRC(write_csv(t, dir / "no" / "such" / "dir.csv"), Errc::IoError);

  std::istringstream bad("method,m\n");
  CHECK_ERRC(read_csv(bad), Errc::ParseError);
}

TEST_CASE("trace csv") {
  TempDir dir("trace");
  ConvergenceTrace tr{{1.5, 2.25}, 2.25};
  write_trace_csv(tr, dir / "trace.csv");
  std::ifstream f(dir / "trace.csv");
  CHECK(std::string(std::istreambuf_iterator<char>(f), {}) == "iteration,avg_entropy\n1,1.5\n2,2.25\n");
}

}  // TEST_SUITE

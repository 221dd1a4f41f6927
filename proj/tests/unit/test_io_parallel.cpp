#include "doctest.h"
#include "helpers.hpp"

#include "ems/matrix_io.hpp"
#include "ems/parallel.hpp"
#include "ems/rng.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace ems;

TEST_SUITE("matrix_io") {

TEST_CASE("round trip is lossless") {
  Rng rng(1);
  Eigen::MatrixXd m(4, 7);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * std::pow(10.0, 20.0 * rng.uniform() - 10.0);
  m(0, 0) = 0.1;
  m(1, 1) = -0.0;
  m(2, 2) = 1e-308;
  std::stringstream ss;
  io::format_matrix(ss, m);
  const auto back = io::parse_matrix(ss);
  CHECK(back == m);

  TempDir dir("mat");
  io::write_matrix(dir / "id.mat", Eigen::MatrixXd::Identity(5, 5));
  CHECK(io::read_matrix(dir / "id.mat") == Eigen::MatrixXd::Identity(5, 5));
}

TEST_CASE("comments, blank lines and scientific notation") {
  std::istringstream in("# leading comment\n\n2 3\n1 2.5e-3 -4E2\n  # inside\n+7 0.125\t-1e+1\n");
  const auto m = io::parse_matrix(in);
  Eigen::MatrixXd expect(2, 3);
  expect << 1, 2.5e-3, -400, 7, 0.125, -10;
  CHECK(m == expect);
  std::istringstream empty("0 0\n");
  CHECK(io::parse_matrix(empty).size() == 0);
}

TEST_CASE("parse errors carry line numbers") {
  auto expect_error = [](const std::string& text, const std::string& where) {
    std::istringstream in(text);
    try {
      io::parse_matrix(in, "m.txt");
      FAIL("expected ParseError for: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK_MESSAGE(std::string(e.what()).find(where) != std::string::npos, e.what());
    }
  };
  expect_error("2 2\n1 2\n", "m.txt:2");
  expect_error("2 2\n1 2\n3\n", "m.txt:3");
  expect_error("1 2\n1 2\n3 4\n", "m.txt:3");
  expect_error("2 x\n", "m.txt:1");
  expect_error("1 2\n1 abc\n", "m.txt:2");
  expect_error("# only a comment\n", "missing header");
  expect_error("3\n", "m.txt:1");
  CHECK_ERRC(io::read_matrix("/nonexistent/path.mat"), Errc::IoError);
}

TEST_CASE("number formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(300.0) == "300");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_double17(0.1) == "0.10000000000000001");
  double v = 0.0;
  CHECK(io::parse_double("1e-3", v));
  CHECK(v == 1e-3);
  CHECK(io::parse_double("inf", v));
  CHECK(std::isinf(v));
  CHECK_FALSE(io::parse_double("1.5x", v));
  CHECK_FALSE(io::parse_double("", v));
}

}  // TEST_SUITE

TEST_SUITE("parallel") {

TEST_CASE("every index is visited exactly once") {
  for (std::size_t threads : {1, 2, 5}) {
    set_max_threads(threads);
    CHECK(max_threads() == threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  set_max_threads(0);
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("exceptions propagate") {
  set_max_threads(3);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 42) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_max_threads(0);
}

TEST_CASE("EMS_THREADS caps the worker count") {
  set_max_threads(0);
  setenv("EMS_THREADS", "3", 1);
  CHECK(max_threads() == 3);
  setenv("EMS_THREADS", "garbage", 1);
  CHECK(max_threads() >= 1);
  unsetenv("EMS_THREADS");
}

}  // TEST_SUITE

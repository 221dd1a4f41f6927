// Python bindings for the ems library. Matrices cross as numpy float64 arrays.

#include "ems/ems.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ems;

namespace {

SparsifyingBasis basis_from(const py::object& spec, Eigen::Index n) {
  if (py::isinstance<py::str>(spec)) return make_basis(spec.cast<std::string>(), n);
  return SparsifyingBasis::from_matrix(spec.cast<Eigen::MatrixXd>());
}

DesignConfig design_config(double alpha, double delta, int outer_iters, std::uint64_t seed,
                           const std::string& stage2) {
  DesignConfig cfg;
  cfg.alpha = alpha;
  cfg.delta = delta;
  cfg.outer_iters = outer_iters;
  cfg.seed = seed;
  cfg.stage2 = parse_stage2(stage2);
  return cfg;
}

py::dict result_dict(const RecoveryResult& r) {
  py::dict d;
  d["coeffs"] = r.coeffs;
  d["iterations"] = r.iterations_used;
  d["residual_norm"] = r.residual_norm;
  d["converged"] = r.converged;
  d["support"] = r.support;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropy-maximising sensing matrices and sparse recovery";

  static py::exception<Error> ems_error(m, "EmsError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(ems_error, e.what());
    }
  });

  m.def("entropy", &entropy_nats, py::arg("v"), "Shannon entropy (nats) of the energy distribution of v");
  m.def("theoretical_dimension", &theoretical_dimension, py::arg("entropy"), py::arg("n"));
  m.def(
      "check_bounds",
      [](const Eigen::VectorXd& c, const Eigen::VectorXd& y) {
        const auto b = check_bounds(c, y);
        py::dict d;
        d["h_c"] = b.h_c;
        d["h_y"] = b.h_y;
        d["k_est"] = b.k_est;
        d["m"] = b.m;
        d["meff"] = b.meff;
        d["entropy_bounds_pass"] = b.entropy_bounds_pass;
        d["meff_cond_pass"] = b.meff_cond_pass;
        return d;
      },
      py::arg("c"), py::arg("y"));
  m.def("mutual_coherence", &mutual_coherence, py::arg("a"));
  m.def("spark", &spark_bruteforce, py::arg("a"), py::arg("rank_tol") = 1e-10);

  m.def(
      "dct_basis", [](Eigen::Index n) { return dct_basis(n).matrix(); }, py::arg("n"),
      "Orthonormal DCT-II synthesis matrix (columns are atoms)");
  m.def(
      "sparse_signals",
      [](Eigen::Index n, Eigen::Index k, Eigen::Index l, const py::object& basis, std::uint64_t seed,
         const std::string& amplitude) {
        return gen_sparse_signals(n, k, l, basis_from(basis, n), seed, parse_amplitude(amplitude)).data;
      },
      py::arg("n"), py::arg("k"), py::arg("l"), py::arg("basis") = "dct", py::arg("seed") = 0,
      py::arg("amplitude") = "unit_normal");
  m.def("add_awgn", &add_awgn, py::arg("x"), py::arg("snr_db"), py::arg("seed") = 0);

  m.def(
      "train",
      [](const Eigen::MatrixXd& x, Eigen::Index m, const py::object& basis, double alpha, double delta,
         int outer_iters, std::uint64_t seed, const std::string& stage2) {
        const auto cfg = design_config(alpha, delta, outer_iters, seed, stage2);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = ems_train(x, basis_from(basis, x.rows()), m, cfg);
        }
        py::dict d;
        d["phi"] = r.design.phi;
        d["a"] = r.design.a;
        d["trace"] = r.trace.avg_entropy_per_iter;
        return d;
      },
      py::arg("x"), py::arg("m"), py::arg("basis") = "dct", py::arg("alpha") = 1.0, py::arg("delta") = 0.1,
      py::arg("outer_iters") = 100, py::arg("seed") = 0, py::arg("stage2") = "closed_form",
      "Train an entropy-maximising sensing matrix on the columns of x");
  m.def("procrustes", [](const Eigen::MatrixXd& c, const Eigen::MatrixXd& y) { return procrustes_rect(c, y); },
        py::arg("c"), py::arg("y_hat"), "Row-orthonormal minimiser of ||y_hat - A c||_F");
  m.def("average_entropy", &average_entropy, py::arg("a"), py::arg("coeffs"));

  m.def(
      "omp", [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y, Eigen::Index k) { return result_dict(omp(a, y, k)); },
      py::arg("a"), py::arg("y"), py::arg("k"));
  m.def(
      "basis_pursuit",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y) { return result_dict(basis_pursuit(a, y)); },
      py::arg("a"), py::arg("y"));
  m.def(
      "bpdn",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double lam) { return result_dict(bpdn(a, y, lam)); },
      py::arg("a"), py::arg("y"), py::arg("lam"));

  m.def("srer", &srer, py::arg("x"), py::arg("x_hat"));
  m.def(
      "sweep_measurements",
      [](Eigen::Index n, Eigen::Index k, const std::vector<Eigen::Index>& m_values, Eigen::Index train,
         Eigen::Index test, const std::vector<std::string>& methods, const std::string& solver, int outer_iters,
         std::uint64_t seed) {
        const auto basis = dct_basis(n);
        const auto split = synthetic_split(n, k, train, test, basis, seed);
        SweepOptions opts;
        opts.methods.clear();
        for (const auto& name : methods) opts.methods.push_back(parse_method(name));
        opts.solver = parse_solver(solver);
        opts.design.outer_iters = outer_iters;
        opts.design.seed = seed;
        opts.seed = seed;
        SweepTable t;
        {
          py::gil_scoped_release release;
          t = sweep_measurements(split.train, split.test, basis, m_values, k, opts);
        }
        py::list rows;
        for (const auto& r : t.rows) {
          py::dict d;
          d["method"] = r.method;
          d["m"] = r.m;
          d["k"] = r.k;
          d["mean_srer_db"] = r.mean_srer_db;
          d["std_srer_db"] = r.std_srer_db;
          d["n_signals"] = r.n_signals;
          rows.append(d);
        }
        return rows;
      },
      py::arg("n"), py::arg("k"), py::arg("m_values"), py::arg("train") = 200, py::arg("test") = 100,
      py::arg("methods") = std::vector<std::string>{"ems", "gaussian"}, py::arg("solver") = "bp",
      py::arg("outer_iters") = 100, py::arg("seed") = 0);

  m.def("read_matrix", [](const std::string& path) { return io::read_matrix(path); }, py::arg("path"));
  m.def(
      "write_matrix", [](const std::string& path, const Eigen::MatrixXd& a) { io::write_matrix(path, a); },
      py::arg("path"), py::arg("a"));
}

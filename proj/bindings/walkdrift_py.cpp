#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/Dense>

#include "walkdrift/bq_drift.hpp"
#include "walkdrift/chain.hpp"
#include "walkdrift/counterexamples.hpp"
#include "walkdrift/experiment.hpp"
#include "walkdrift/finite_dist.hpp"
#include "walkdrift/lattice.hpp"
#include "walkdrift/real_chains.hpp"

namespace py = pybind11;
using namespace walkdrift;

namespace {

using DoubleMatrix = std::vector<std::vector<double>>;

Eigen::MatrixXd to_eigen(const DoubleMatrix& rows) {
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) {
            throw Error("matrix rows must be square");
        }
        for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

DoubleMatrix from_eigen(const Eigen::MatrixXd& m) {
    DoubleMatrix rows(static_cast<std::size_t>(m.rows()),
                      std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
    return rows;
}

bq::MatrixMeasure measure_from_lists(const std::vector<DoubleMatrix>& matrices,
                                     const std::vector<double>& weights) {
    if (matrices.size() != weights.size()) throw Error("matrices/weights length mismatch");
    std::vector<std::pair<Eigen::MatrixXd, double>> atoms;
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        atoms.emplace_back(to_eigen(matrices[i]), weights[i]);
    }
    return bq::MatrixMeasure::make(std::move(atoms));
}

chain::ChainKernel<double> kernel_by_kind(const std::string& kind,
                                          const std::vector<double>& increments, double shift) {
    if (kind == "translation") return chain::translation_kernel(shift);
    if (kind == "reflected_uniform") {
        return chain::reflected_increment_kernel(dist::FiniteDist::uniform(increments));
    }
    if (kind == "iid_uniform") {
        return chain::iid_increment_kernel(dist::FiniteDist::uniform(increments));
    }
    throw Error("unknown chain kind '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_walkdrift, m) {
    m.doc() = "Recurrence machinery for random walks with drift: finite "
              "distributions with stochastic dominance, chain statistics, the "
              "escape counterexamples, and the lattice drift function.";

    py::register_exception<Error>(m, "WalkdriftError");

    // ---- finite distributions ------------------------------------------
    py::class_<dist::FiniteDist>(m, "FiniteDist")
        .def_static("from_atoms",
                    [](const std::vector<std::pair<double, double>>& atoms) {
                        std::vector<dist::FiniteDist::Atom> a;
                        for (const auto& [v, w] : atoms) a.push_back({v, w});
                        return dist::FiniteDist::from_atoms(std::move(a));
                    })
        .def_static("delta", &dist::FiniteDist::delta)
        .def_static("uniform", &dist::FiniteDist::uniform)
        .def("atoms",
             [](const dist::FiniteDist& d) {
                 std::vector<std::pair<double, double>> out;
                 for (const auto& a : d.atoms()) out.emplace_back(a.value, a.weight);
                 return out;
             })
        .def("mean", &dist::FiniteDist::mean)
        .def("tail_gt", &dist::FiniteDist::tail_gt)
        .def("__len__", &dist::FiniteDist::size)
        .def("__eq__", [](const dist::FiniteDist& a, const dist::FiniteDist& b) { return a == b; });

    py::class_<dist::StepRealisation>(m, "StepRealisation")
        .def_readonly("upper_s", &dist::StepRealisation::upper_s)
        .def_readonly("value", &dist::StepRealisation::value)
        .def("__call__", &dist::StepRealisation::operator())
        .def("integral_up_to", &dist::StepRealisation::integral_up_to)
        .def("measure_above", &dist::StepRealisation::measure_above);

    py::class_<dist::DriftSpec>(m, "DriftSpec")
        .def_readonly("R0", &dist::DriftSpec::R0)
        .def_readonly("lambda1", &dist::DriftSpec::lambda1)
        .def_readonly("Z0", &dist::DriftSpec::Z0)
        .def_readonly("Z1", &dist::DriftSpec::Z1);

    m.def("standard_realisation", &dist::standard_realisation);
    m.def("dominates", &dist::dominates, py::arg("upper"), py::arg("lower"));
    m.def("truncated_tail_expectation", &dist::truncated_tail_expectation);
    m.def("build_dominating_pair", &dist::build_dominating_pair, py::arg("Z"), py::arg("R0"),
          py::arg("lam"), py::arg("alpha"));
    m.def("empirical_distribution", [](const std::vector<double>& samples) {
        return dist::empirical_distribution(samples);
    });

    // ---- chain statistics ------------------------------------------------
    m.def(
        "simulate",
        [](const std::string& kind, const std::vector<double>& increments, double shift, double x0,
           long n, std::uint64_t seed) {
            return chain::simulate(kernel_by_kind(kind, increments, shift), x0, n, seed);
        },
        py::arg("kind"), py::arg("increments") = std::vector<double>{},
        py::arg("shift") = -1.0, py::arg("x0") = 0.0, py::arg("n") = 100, py::arg("seed") = 1);
    m.def(
        "first_return_time",
        [](const std::string& kind, const std::vector<double>& increments, double shift, double R0,
           double x0, std::uint64_t seed, long horizon) {
            const auto rt = chain::first_return_time(kernel_by_kind(kind, increments, shift),
                                                     chain::identity_drift(), R0, x0, seed, horizon);
            return py::make_tuple(rt.time, rt.censored);
        },
        py::arg("kind"), py::arg("increments"), py::arg("shift"), py::arg("R0"), py::arg("x0"),
        py::arg("seed"), py::arg("horizon"));
    m.def(
        "occupation_fraction",
        [](const std::string& kind, const std::vector<double>& increments, double shift, double R,
           double x0, long n, std::uint64_t seed) {
            return chain::occupation_fraction(kernel_by_kind(kind, increments, shift),
                                              chain::identity_drift(), R, x0, n, seed);
        },
        py::arg("kind"), py::arg("increments"), py::arg("shift"), py::arg("R"), py::arg("x0"),
        py::arg("n"), py::arg("seed"));
    m.def("moment_bound_m1", [](double M, double eta, double R0, double lambda1, double fx) {
        return chain::moment_bound_m1(chain::MomentParams{M, eta, R0, lambda1}, fx);
    });

    // ---- counterexamples --------------------------------------------------
    m.def("stay_probability", &cx::stay_probability, py::arg("alpha"), py::arg("R"));
    py::class_<cx::MassEscapeSchedule>(m, "MassEscapeSchedule")
        .def_readonly("x", &cx::MassEscapeSchedule::x)
        .def_readonly("alpha", &cx::MassEscapeSchedule::alpha)
        .def_readonly("n", &cx::MassEscapeSchedule::n)
        .def_readonly("achieved", &cx::MassEscapeSchedule::achieved)
        .def_readonly("target", &cx::MassEscapeSchedule::target);
    m.def(
        "build_mass_escape_schedule",
        [](int depth, long long m0, long long m1, long validation_trials, std::uint64_t seed) {
            cx::MassEscapeOptions opt;
            opt.depth = depth;
            opt.m0 = m0;
            opt.m1 = m1;
            opt.validation_trials = validation_trials;
            opt.seed = seed;
            return cx::build_mass_escape_schedule(opt);
        },
        py::arg("depth") = 4, py::arg("m0") = 125, py::arg("m1") = 1000,
        py::arg("validation_trials") = 4000, py::arg("seed") = 1);
    m.def(
        "demonstrate_empirical_escape",
        [](double epsilon, double R, long horizon, long trials, std::uint64_t seed) {
            const auto rep = cx::demonstrate_empirical_escape(epsilon, R, horizon, trials, seed);
            return py::make_tuple(rep.detection_fraction, rep.divergence_partial_sums);
        },
        py::arg("epsilon"), py::arg("R"), py::arg("horizon"), py::arg("trials"), py::arg("seed"));

    // ---- lattices ----------------------------------------------------------
    py::class_<lat::LatticeBasis>(m, "LatticeBasis")
        .def_static("from_columns",
                    [](const DoubleMatrix& rows) {
                        return lat::LatticeBasis::from_columns(to_eigen(rows));
                    })
        .def_static("identity", &lat::LatticeBasis::identity)
        .def("dim", &lat::LatticeBasis::dim)
        .def("columns", [](const lat::LatticeBasis& b) { return from_eigen(b.columns()); })
        .def("condition_number", &lat::LatticeBasis::condition_number);

    py::class_<lat::Sublattice>(m, "Sublattice")
        .def_readonly("rank", &lat::Sublattice::rank)
        .def_readonly("coeffs", &lat::Sublattice::coeffs);

    m.def("lll_reduce", [](const lat::LatticeBasis& b) {
        const auto res = lat::lll_reduce(b);
        return py::make_tuple(res.basis, res.transform);
    });
    m.def("covolume", [](const lat::LatticeBasis& b, const lat::Sublattice& s) {
        return lat::covolume(b, s);
    });
    m.def("short_vectors", &lat::short_vectors, py::arg("basis"), py::arg("bound"),
          py::arg("cap") = 1000000);
    m.def("enumerate_small_sublattices", &lat::enumerate_small_sublattices, py::arg("basis"),
          py::arg("rank"), py::arg("covolume_bound"), py::arg("cap") = 1000000);
    m.def("hnf_canonicalize", &lat::hnf_canonicalize);
    m.def("saturate", [](const std::vector<std::vector<long long>>& coeffs, int d) {
        const auto res = lat::saturate_coeffs(coeffs, d);
        switch (res.kind) {
            case lat::SubKind::Zero: return py::make_tuple("zero", py::none());
            case lat::SubKind::Full: return py::make_tuple("full", py::none());
            default: return py::make_tuple("proper", py::cast(res.sub));
        }
    });
    m.def("sum_and_intersection",
          [](const lat::Sublattice& a, const lat::Sublattice& b, int d) {
              const auto [sum, inter] = lat::sum_and_intersection(a, b, d);
              auto pack = [](const lat::SubOrMarker& r) -> py::object {
                  switch (r.kind) {
                      case lat::SubKind::Zero: return py::str("zero");
                      case lat::SubKind::Full: return py::str("full");
                      default: return py::cast(r.sub);
                  }
              };
              return py::make_tuple(pack(sum), pack(inter));
          });
    m.def("primitive_vector_count", &lat::primitive_vector_count);

    // ---- drift machinery ----------------------------------------------------
    py::class_<bq::MatrixMeasure>(m, "MatrixMeasure")
        .def_static("from_lists", &measure_from_lists)
        .def_readonly("d", &bq::MatrixMeasure::d)
        .def("is_symmetric", &bq::MatrixMeasure::is_symmetric, py::arg("tol") = 1e-9);
    m.def("sl2_unipotent_measure", &bq::sl2_unipotent_measure);

    py::class_<bq::QuasiNormParams>(m, "QuasiNormParams")
        .def_static("make", &bq::QuasiNormParams::make)
        .def_readonly("d", &bq::QuasiNormParams::d)
        .def_readonly("A", &bq::QuasiNormParams::A)
        .def_readonly("exponents", &bq::QuasiNormParams::exponents);

    m.def("estimate_lyapunov", [](const bq::MatrixMeasure& mu, int rank, long steps, long trials,
                                  std::uint64_t seed) {
        const auto est = bq::estimate_lyapunov(mu, rank, steps, trials, seed);
        return py::make_tuple(est.value, est.ci);
    });
    m.def("phi_A", &bq::phi_A);
    m.def("f_A", &bq::f_A);
    m.def("variation_constant", &bq::variation_constant);
    m.def("truncated_log_norm_expectation", &bq::truncated_log_norm_expectation, py::arg("mu"),
          py::arg("rank"), py::arg("n"), py::arg("alpha"), py::arg("trials"), py::arg("seed"));

    // ---- experiments ----------------------------------------------------------
    m.def("siegel_reference_d2", &exp::siegel_reference_d2);
    m.def(
        "siegel_equidistribution",
        [](const bq::MatrixMeasure& mu, const lat::LatticeBasis& x0, long steps, double radius,
           long trials, std::uint64_t seed) {
            const auto rep = exp::siegel_equidistribution(mu, x0, steps, radius, trials, seed);
            return py::make_tuple(rep.cesaro_average, rep.reference, rep.relative_error);
        },
        py::arg("mu"), py::arg("x0"), py::arg("steps"), py::arg("radius"), py::arg("trials"),
        py::arg("seed"));
    m.def(
        "occupation_experiment",
        [](const bq::MatrixMeasure& mu, const lat::LatticeBasis& x0, long steps,
           const std::vector<double>& grid, const bq::QuasiNormParams& params,
           std::uint64_t seed) {
            const auto rep = exp::occupation_experiment(mu, x0, steps, grid, params, seed);
            return py::make_tuple(rep.R_grid, rep.below_fraction);
        },
        py::arg("mu"), py::arg("x0"), py::arg("steps"), py::arg("grid"), py::arg("params"),
        py::arg("seed"));
}

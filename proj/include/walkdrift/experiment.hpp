#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkdrift/bq_drift.hpp"
#include "walkdrift/chain.hpp"
#include "walkdrift/lattice.hpp"

namespace walkdrift::exp {

// Cesàro average of primitive ball counts along matrix-walk trajectories,
// against the Haar reference vol(B_r)/zeta(d).
struct SiegelReport {
    double cesaro_average;
    double reference;
    double relative_error;
    long steps;
    long trials;
    std::vector<double> per_trajectory;
};

SiegelReport siegel_equidistribution(const bq::MatrixMeasure& mu, const lat::LatticeBasis& x0,
                                     long steps, double radius, long trials, std::uint64_t seed,
                                     std::optional<double> reference_override = std::nullopt);

// vol(B_r)/zeta(2) = 6 r^2 / pi for d = 2; the checked-in constants file from
// the fundamental-domain oracle script validates this value.
double siegel_reference_d2(double radius);

// Occupation fractions of {f_A <= R} along one matrix walk, per R in grid.
struct OccupationReport {
    std::vector<double> R_grid;
    std::vector<double> below_fraction;  // fraction of steps with f_A <= R
    long steps;
};

OccupationReport occupation_experiment(const bq::MatrixMeasure& mu, const lat::LatticeBasis& x0,
                                       long steps, const std::vector<double>& R_grid,
                                       const bq::QuasiNormParams& params, std::uint64_t seed);

// Rotated diagonal lattices with prescribed f_A; the sampler for drift checks.
std::vector<lat::LatticeBasis> sample_high_lattices_d2(const bq::QuasiNormParams& params,
                                                       long count, double f_low, double f_high,
                                                       std::uint64_t seed);

// Empirical (R, epsilon) calibration for the mass-conservation bound: finds a
// renewal window l for alpha = epsilon/2, then an R making the pre-window
// escape mass small; reports achieved values.
struct RecLawCalibration {
    bool found;
    double R;
    double epsilon;
    long window;
};

template <class State>
RecLawCalibration rec_law_calibrate(const chain::ChainKernel<State>& kernel,
                                    const chain::DriftFunction<State>& f, double R0,
                                    const std::vector<State>& probes, double epsilon, long horizon,
                                    long trials, std::uint64_t seed) {
    const auto window =
        chain::renewal_window_search(kernel, f, R0, probes, epsilon / 2.0, horizon, trials, seed);
    if (!window.found) return {false, 0.0, epsilon, 0};
    // choose R as a high quantile of sup_{n <= l} f(X_n) over probe starts
    std::vector<double> sups;
    sups.resize(static_cast<std::size_t>(trials) * probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            Rng rng(seed + 1299709, p * static_cast<std::size_t>(trials) + t);
            State x = probes[p];
            double sup = f(x);
            for (long k = 1; k <= window.window; ++k) {
                x = kernel.step(x, rng);
                sup = std::max(sup, f(x));
            }
            sups[p * static_cast<std::size_t>(trials) + t] = sup;
        });
    }
    std::sort(sups.begin(), sups.end());
    const double q = 1.0 - epsilon / 4.0;
    const double R =
        sups[static_cast<std::size_t>(q * static_cast<double>(sups.size() - 1))] + 1e-9;
    return {true, std::max(R, R0), epsilon, window.window};
}

// --- file formats (External Interfaces) ---------------------------------

// LatticeBasis as CSV: d rows of d reals (columns of the basis, row-major).
lat::LatticeBasis read_lattice_csv(const std::string& path);
void write_lattice_csv(const std::string& path, const lat::LatticeBasis& basis);

// MatrixMeasure as CSV blocks: d matrix rows, then a `weight=...` line.
bq::MatrixMeasure read_matrix_measure(const std::string& path);
void write_matrix_measure(const std::string& path, const bq::MatrixMeasure& mu);

}  // namespace walkdrift::exp

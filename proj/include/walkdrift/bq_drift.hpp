#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "walkdrift/chain.hpp"
#include "walkdrift/finite_dist.hpp"
#include "walkdrift/lattice.hpp"
#include "walkdrift/rng.hpp"

namespace walkdrift::bq {

// Finitely supported measure on SL_d^{+-}(R).
struct MatrixMeasure {
    int d;
    std::vector<std::pair<Eigen::MatrixXd, double>> atoms;

    static MatrixMeasure make(std::vector<std::pair<Eigen::MatrixXd, double>> atoms);
    const Eigen::MatrixXd& sample(Rng& rng) const;
    // product g_n ... g_1 of iid draws
    Eigen::MatrixXd sample_product(long n, Rng& rng) const;
    // true when the atom set is closed under g -> (g^{-1})^T (duality check)
    bool is_symmetric(double tol = 1e-9) const;
};

// Uniform on the elementary unipotents {L, R, L^{-1}, R^{-1}} in SL_2(Z).
MatrixMeasure sl2_unipotent_measure();

// (d, A, per-rank exponents lambda_1^{(i)} for i = 1..d-1), the data behind
// the corrected quasi-norm |v|_A = |e^{A i(d-i)} v|.
struct QuasiNormParams {
    int d;
    double A;
    std::vector<double> exponents;

    static QuasiNormParams make(int d, double A, std::vector<double> exponents);
    double exponent(int rank) const { return exponents[static_cast<std::size_t>(rank - 1)]; }
};

struct LyapunovEstimate {
    double value;
    double ci;  // z * sd / sqrt(trials), z = 2.5758 (99%)
};

// (1/n) log ||wedge^i (g_n...g_1)||_op averaged over seeded trials.
LyapunovEstimate estimate_lyapunov(const MatrixMeasure& mu, int rank, long steps, long trials,
                                   std::uint64_t seed);

// Per-rank exponent table for ranks 1..d-1.
std::vector<LyapunovEstimate> lyapunov_table(const MatrixMeasure& mu, long steps, long trials,
                                             std::uint64_t seed);

// phi_A(Delta) = -(A i(d-i) + log covolume(Delta)) / lambda^{(i)} for rank i.
double phi_A(const lat::Sublattice& sub, const lat::LatticeBasis& basis,
             const QuasiNormParams& params);

struct FAResult {
    double value;               // max(0, max phi_A)
    bool has_positive_max;      // false when the rank-0/d convention wins
    lat::Sublattice argmax;     // meaningful iff has_positive_max
};

FAResult f_A_detailed(const lat::LatticeBasis& basis, const QuasiNormParams& params);
double f_A(const lat::LatticeBasis& basis, const QuasiNormParams& params);

// C = max_i i(d-1)/lambda^{(i)}, from ||wedge^i g^{-1}|| <= ||g||^{i(d-1)}
// for |det g| = 1.
double variation_constant(const QuasiNormParams& params);

// One walk step on the lattice space with LLL renormalization: the returned
// basis spans g * (columns of x) but is kept reduced and det-rescaled so long
// products stay numerically meaningful.
lat::LatticeBasis apply_step(const Eigen::MatrixXd& g, const lat::LatticeBasis& x);
lat::LatticeBasis walk_lattice(const MatrixMeasure& mu, const lat::LatticeBasis& x0, long n,
                               Rng& rng);

struct DecreasePerLattice {
    double f_before;
    double fraction;   // P̂(f_A(gx) <= f_A(x) - n lambda)
    bool skipped;      // precondition f_A(x) > A0 failed
};

struct DecreaseReport {
    std::vector<DecreasePerLattice> lattices;
    double lambda;
    long n;
    double min_fraction;  // over non-skipped lattices
};

// Prop-style probable decrease check: g ~ mu^{*n}, fraction of decrease by
// n*lambda per lattice. lambda <= 0 selects the default min_i exponent / 2.
DecreaseReport check_probable_decrease(const MatrixMeasure& mu, const QuasiNormParams& params,
                                       long n, const std::vector<lat::LatticeBasis>& lattices,
                                       double A0, long trials, std::uint64_t seed,
                                       double lambda = 0.0);

// True iff for each rank at most one primitive sublattice has
// phi_A >= f_A - A0. Throws DomainError when f_A(basis) <= A0.
bool check_uniqueness_at_top(const lat::LatticeBasis& basis, const QuasiNormParams& params,
                             double A0);

// Doubles A until check_uniqueness_at_top holds on every validation lattice
// (with f_A recomputed at the candidate A); returns the calibrated A.
double calibrate_uniqueness_A(const std::vector<lat::LatticeBasis>& validation, int d,
                              const std::vector<double>& exponents, double A0, double A_init = 1.0,
                              int max_doublings = 12);

// Monte Carlo E[Z'_n 1_{(0,alpha]}] for Z_n = log||Phi(g)|| under mu^{*n};
// rank 0 selects the defining representation, 1..d-1 the exterior powers.
double truncated_log_norm_expectation(const MatrixMeasure& mu, int rank, long n, double alpha,
                                      long trials, std::uint64_t seed);

// Executable conversion check: picks (alpha, n0) per the representation's
// growth rate, verifies the truncated expectation bound, and builds the
// dominance certificate for the n0-step walk with Z = C log||Phi(g)||.
struct SdMunResult {
    bool certified;
    double alpha;
    long n0;
    double truncated;      // E[Z' 1_{(0,alpha]}] at n0
    double growth_rate;    // estimated (1/n) E log||Phi(g)||
    dist::DriftSpec spec;  // meaningful iff certified
};

SdMunResult certify_sd_mun(const MatrixMeasure& mu, int rank, double lambda, double C, double R0,
                           long trials, std::uint64_t seed, long n_max = 512);

// Drift combinators ------------------------------------------------------

template <class State>
chain::DriftFunction<State> max_drift(chain::DriftFunction<State> f0,
                                      chain::DriftFunction<State> f1) {
    chain::DriftFunction<State> out;
    out.label = "max(" + f0.label + "," + f1.label + ")";
    out.eval = [f0 = std::move(f0.eval), f1 = std::move(f1.eval)](const State& x) {
        return std::max(f0(x), f1(x));
    };
    return out;
}

// x -> c_x f0(x) + f1(x) with c_x = c above T', affine on [T0, T'], 0 below.
template <class State>
chain::DriftFunction<State> glue_drift(chain::DriftFunction<State> f0,
                                       chain::DriftFunction<State> f1, double c, double T0,
                                       double Tprime) {
    if (!(c > 1.0)) throw DomainError("glue_drift: c must exceed 1");
    if (!(Tprime > T0)) throw DomainError("glue_drift: need T' > T0");
    chain::DriftFunction<State> out;
    out.label = "glue(" + f0.label + "," + f1.label + ")";
    out.eval = [f0 = std::move(f0.eval), f1 = std::move(f1.eval), c, T0, Tprime](const State& x) {
        const double v0 = f0(x);
        double cx;
        if (v0 >= Tprime) {
            cx = c;
        } else if (v0 >= T0) {
            cx = c * (v0 - T0) / (Tprime - T0);
        } else {
            cx = 0.0;
        }
        return cx * v0 + f1(x);
    };
    return out;
}

}  // namespace walkdrift::bq

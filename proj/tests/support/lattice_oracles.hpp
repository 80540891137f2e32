#pragma once

// Brute-force coefficient-box oracles for the lattice module. Independent of
// the Fincke-Pohst/LLL enumeration path: plain box scans with bounds derived
// from the basis inverse norm.

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "walkdrift/intmat.hpp"
#include "walkdrift/rng.hpp"
#include "walkdrift/errors.hpp"
#include "walkdrift/lattice.hpp"

namespace latoracle {

using walkdrift::intmat::Int;
using walkdrift::intmat::Matrix;
using walkdrift::intmat::Row;
using walkdrift::lat::LatticeBasis;
using walkdrift::lat::Sublattice;

// Any lattice vector with ||B c|| <= bound has |c_j| <= ||B^{-1}||_2 * bound.
inline Int coeff_box(const LatticeBasis& basis, double bound) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.columns());
    const double inv_norm = 1.0 / svd.singularValues()(basis.dim() - 1);
    return static_cast<Int>(std::floor(inv_norm * bound + 1e-9)) + 1;
}

// All nonzero vectors with norm <= bound, canonical sign, by box scan.
inline std::vector<Row> box_short_vectors(const LatticeBasis& basis, double bound) {
    const int d = basis.dim();
    const Int C = coeff_box(basis, bound);
    std::vector<Row> out;
    Row c(static_cast<std::size_t>(d), -C);
    for (;;) {
        bool nonzero = false;
        bool canonical = false;
        for (int j = d - 1; j >= 0; --j) {
            if (c[static_cast<std::size_t>(j)] != 0) {
                nonzero = true;
                canonical = c[static_cast<std::size_t>(j)] > 0;
                break;
            }
        }
        if (nonzero && canonical &&
            basis.vector_from_coeffs(c).norm() <= bound * (1.0 + 1e-12)) {
            out.push_back(c);
        }
        int j = 0;
        while (j < d && c[static_cast<std::size_t>(j)] == C) {
            c[static_cast<std::size_t>(j)] = -C;
            ++j;
        }
        if (j == d) break;
        ++c[static_cast<std::size_t>(j)];
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Exact first minimum by box scan (box bounded via the shortest basis column).
inline double box_first_minimum(const LatticeBasis& basis) {
    double shortest_col = basis.columns().col(0).norm();
    for (int j = 1; j < basis.dim(); ++j) {
        shortest_col = std::min(shortest_col, basis.columns().col(j).norm());
    }
    double best = shortest_col;
    for (const Row& c : box_short_vectors(basis, shortest_col)) {
        best = std::min(best, basis.vector_from_coeffs(c).norm());
    }
    return best;
}

// All primitive rank-i sublattices with covolume <= bound, as canonical HNF
// matrices. Rank 1 scans vectors directly; higher ranks scan subsets of a
// box-enumerated generator pool sized by the Minkowski reduced-basis bound.
inline std::set<Matrix> box_small_sublattices(const LatticeBasis& basis, int rank, double bound) {
    using walkdrift::lat::covolume_coeffs;
    std::set<Matrix> out;
    if (rank == 1) {
        for (const Row& c : box_short_vectors(basis, bound)) {
            Int g = 0;
            for (Int e : c) g = std::gcd(g, e);
            if (g == 1) out.insert(walkdrift::lat::hnf_canonicalize({c}));
        }
        return out;
    }
    if (rank != 2) throw walkdrift::Error("box_small_sublattices: rank 1 and 2 only");
    // Gauss-reduced basis (b1, b2) of a rank-2 sublattice of covolume <= V:
    // ||b1|| = lambda_1 <= sqrt(gamma_2 V), ||b2|| = lambda_2 <= gamma_2 V / m
    // with m the ambient first minimum. Scan the two pools separately.
    const double gamma2 = 1.1547005383792517;
    const double m = box_first_minimum(basis);
    const auto small_pool = box_short_vectors(basis, std::sqrt(gamma2 * bound) * (1.0 + 1e-9));
    const auto big_pool = box_short_vectors(basis, gamma2 * bound / m * (1.0 + 1e-9));
    for (const Row& v : small_pool) {
        for (const Row& w : big_pool) {
            Matrix coeffs{v, w};
            if (walkdrift::intmat::rank(coeffs) != 2) continue;
            if (walkdrift::intmat::gcd_maximal_minors(coeffs) != 1) continue;
            if (covolume_coeffs(basis, coeffs) > bound * (1.0 + 1e-12)) continue;
            out.insert(walkdrift::lat::hnf_canonicalize(coeffs));
        }
    }
    return out;
}

// Random basis with |det| = 1 via normalization. max_cond keeps the brute
// force box bounded when the basis is used against an oracle; skewed lattices
// (small first minimum, nonempty enumerations) come from min_sv < 1.
inline LatticeBasis random_unimodular_basis(walkdrift::Rng& rng, int d, double min_sv = 1.0,
                                            double max_cond = 40.0) {
    for (;;) {
        Eigen::MatrixXd m(d, d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) m(i, j) = rng.uniform() * 2.0 - 1.0;
        }
        const double det = m.determinant();
        if (std::abs(det) < 1e-2) continue;
        m /= std::pow(std::abs(det), 1.0 / d);
        if (min_sv < 1.0) {
            // squeeze one direction to min_sv, stretch the rest to compensate
            Eigen::JacobiSVD<Eigen::MatrixXd> svd0(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
            Eigen::VectorXd s = svd0.singularValues();
            const double target = min_sv * (0.75 + 0.5 * rng.uniform());
            const double ratio = s(d - 1) / target;
            s(d - 1) = target;
            for (int j = 0; j < d - 1; ++j) s(j) *= std::pow(ratio, 1.0 / (d - 1));
            m = svd0.matrixU() * s.asDiagonal() * svd0.matrixV().transpose();
            m /= std::pow(std::abs(m.determinant()), 1.0 / d);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        if (svd.singularValues()(0) / svd.singularValues()(d - 1) > max_cond) continue;
        return LatticeBasis::from_columns(m);
    }
}

// Random integer matrix with determinant +-1 (product of elementary shears
// and swaps), entries kept small.
inline Matrix random_unimodular_int(walkdrift::Rng& rng, int d, int ops = 6) {
    Matrix u = walkdrift::intmat::identity(static_cast<std::size_t>(d));
    if (d == 1) {
        u[0][0] = rng.below(2) == 0 ? 1 : -1;
        return u;
    }
    for (int o = 0; o < ops; ++o) {
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        while (j == i) j = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        const Int q = static_cast<Int>(rng.below(5)) - 2;
        for (int c = 0; c < d; ++c) {
            u[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] += q *
                u[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
        }
        if (rng.below(4) == 0) std::swap(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]);
    }
    return u;
}

}  // namespace latoracle

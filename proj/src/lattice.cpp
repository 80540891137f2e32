#include "walkdrift/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "walkdrift/errors.hpp"

namespace walkdrift::lat {

using intmat::Int;
using intmat::Matrix;
using intmat::Row;

LatticeBasis LatticeBasis::from_columns(Eigen::MatrixXd columns) {
    if (columns.rows() != columns.cols() || columns.rows() < 2) {
        throw Error("LatticeBasis: need a square basis with d >= 2");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(columns.cols() - 1);
    if (!(smin > 0.0) || smax / smin > 1e12) {
        throw NumericalRankError("LatticeBasis: condition number exceeds 1e12");
    }
    const double adet = std::abs(columns.determinant());
    if (std::abs(adet - 1.0) > 1e-9) {
        throw Error("LatticeBasis: |det| = " + std::to_string(adet) + ", not unimodular");
    }
    return LatticeBasis(std::move(columns), smax / smin);
}

LatticeBasis LatticeBasis::identity(int d) {
    return from_columns(Eigen::MatrixXd::Identity(d, d));
}

Eigen::VectorXd LatticeBasis::vector_from_coeffs(const Row& coeffs) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim());
    for (int j = 0; j < dim(); ++j) {
        v += static_cast<double>(coeffs[static_cast<std::size_t>(j)]) * columns_.col(j);
    }
    return v;
}

namespace {

struct GramSchmidt {
    Eigen::MatrixXd mu;          // mu(i,j) for j < i
    Eigen::VectorXd norms2;      // ||b*_i||^2
};

GramSchmidt gram_schmidt(const Eigen::MatrixXd& b) {
    const int d = static_cast<int>(b.cols());
    Eigen::MatrixXd star = b;
    GramSchmidt gs;
    gs.mu = Eigen::MatrixXd::Zero(d, d);
    gs.norms2 = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
            gs.mu(i, j) = b.col(i).dot(star.col(j)) / gs.norms2(j);
            star.col(i) -= gs.mu(i, j) * star.col(j);
        }
        gs.norms2(i) = star.col(i).squaredNorm();
        if (!(gs.norms2(i) > 1e-280)) {
            throw NumericalRankError("lll_reduce: Gram-Schmidt norm collapsed");
        }
    }
    return gs;
}

}  // namespace

namespace {

struct LllCore {
    Eigen::MatrixXd reduced;
    Matrix transform;  // reduced = input * transform, det +-1
};

LllCore lll_columns(Eigen::MatrixXd b, double delta) {
    const int d = static_cast<int>(b.cols());
    Matrix u = intmat::identity(static_cast<std::size_t>(d));
    GramSchmidt gs = gram_schmidt(b);

    auto size_reduce = [&](int k, int j) {
        const double q = std::round(gs.mu(k, j));
        if (q == 0.0) return;
        const Int qi = static_cast<Int>(q);
        b.col(k) -= q * b.col(j);
        for (int r = 0; r < d; ++r) {
            auto& col_k = u[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
            col_k = intmat::checked_add(
                col_k, intmat::checked_mul(-qi, u[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]));
        }
        for (int c = 0; c < j; ++c) gs.mu(k, c) -= q * gs.mu(j, c);
        gs.mu(k, j) -= q;
    };

    int k = 1;
    long guard = 0;
    while (k < d) {
        if (++guard > 100000) throw Error("lll_columns: failed to converge");
        for (int j = k - 1; j >= 0; --j) size_reduce(k, j);
        if (gs.norms2(k) >= (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.norms2(k - 1)) {
            ++k;
        } else {
            b.col(k).swap(b.col(k - 1));
            for (int r = 0; r < d; ++r) {
                std::swap(u[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)],
                          u[static_cast<std::size_t>(r)][static_cast<std::size_t>(k - 1)]);
            }
            gs = gram_schmidt(b);
            k = std::max(k - 1, 1);
        }
    }
    return LllCore{std::move(b), std::move(u)};
}

}  // namespace

LllResult lll_reduce(const LatticeBasis& basis, double delta) {
    LllCore core = lll_columns(basis.columns(), delta);
    return LllResult{LatticeBasis::from_columns(std::move(core.reduced)),
                     std::move(core.transform)};
}

double covolume_columns(const Eigen::MatrixXd& columns, const Matrix& coeffs) {
    const int r = static_cast<int>(coeffs.size());
    const int d = static_cast<int>(columns.rows());
    Eigen::MatrixXd gens = Eigen::MatrixXd::Zero(d, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < d; ++j) {
            gens.col(i) += static_cast<double>(coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) *
                           columns.col(j);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gens);
    const Eigen::MatrixXd rmat =
        qr.matrixQR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
    double vol = 1.0;
    for (int i = 0; i < r; ++i) vol *= std::abs(rmat(i, i));
    return vol;
}

double covolume_coeffs(const LatticeBasis& basis, const Matrix& coeffs) {
    return covolume_columns(basis.columns(), coeffs);
}

double covolume(const LatticeBasis& basis, const Sublattice& sub) {
    return covolume_coeffs(basis, sub.coeffs);
}

double first_minimum_lower_bound(const LatticeBasis& basis) {
    const auto red = lll_reduce(basis);
    const GramSchmidt gs = gram_schmidt(red.basis.columns());
    return std::sqrt(gs.norms2.minCoeff());
}

namespace {

std::vector<Row> short_vectors_columns(const Eigen::MatrixXd& columns, double bound,
                                       std::size_t cap) {
    if (!(bound > 0.0)) throw DomainError("short_vectors: bound must be positive");
    const int d = static_cast<int>(columns.cols());
    const LllCore red = lll_columns(columns, 0.99);
    const GramSchmidt gs = gram_schmidt(red.reduced);
    const double budget = bound * bound * (1.0 + 1e-12);

    // Fincke-Pohst over Q(x) = sum_i c_i (x_i + sum_{j>i} mu_ji x_j)^2.
    std::vector<Row> found;  // coefficients w.r.t. the reduced basis
    Row x(static_cast<std::size_t>(d), 0);
    std::vector<double> center(static_cast<std::size_t>(d), 0.0);
    std::vector<double> partial(static_cast<std::size_t>(d) + 1, 0.0);

    // Depth-first over levels i = d-1 .. 0.
    struct Frame {
        Int lo, hi, cur;
    };
    std::vector<Frame> stack(static_cast<std::size_t>(d));
    int level = d - 1;
    auto enter_level = [&](int i) {
        double c = 0.0;
        for (int j = i + 1; j < d; ++j) {
            c += gs.mu(j, i) * static_cast<double>(x[static_cast<std::size_t>(j)]);
        }
        center[static_cast<std::size_t>(i)] = c;
        const double room = budget - partial[static_cast<std::size_t>(i) + 1];
        if (room < 0.0) {
            stack[static_cast<std::size_t>(i)] = {1, 0, 1};  // empty range
            return;
        }
        const double radius = std::sqrt(room / gs.norms2(i));
        const Int lo = static_cast<Int>(std::ceil(-c - radius - 1e-12));
        const Int hi = static_cast<Int>(std::floor(-c + radius + 1e-12));
        stack[static_cast<std::size_t>(i)] = {lo, hi, lo};
    };
    enter_level(level);
    while (level < d) {
        auto& fr = stack[static_cast<std::size_t>(level)];
        if (fr.cur > fr.hi) {
            ++level;  // backtrack
            if (level < d) ++stack[static_cast<std::size_t>(level)].cur;
            continue;
        }
        x[static_cast<std::size_t>(level)] = fr.cur;
        const double t = static_cast<double>(fr.cur) + center[static_cast<std::size_t>(level)];
        partial[static_cast<std::size_t>(level)] =
            partial[static_cast<std::size_t>(level) + 1] + gs.norms2(level) * t * t;
        if (partial[static_cast<std::size_t>(level)] > budget) {
            ++fr.cur;
            continue;
        }
        if (level == 0) {
            // keep one representative per +- pair: last nonzero coordinate > 0
            bool nonzero = false;
            bool canonical = false;
            for (int j = d - 1; j >= 0; --j) {
                if (x[static_cast<std::size_t>(j)] != 0) {
                    nonzero = true;
                    canonical = x[static_cast<std::size_t>(j)] > 0;
                    break;
                }
            }
            if (nonzero && canonical) {
                found.push_back(x);
                if (found.size() > cap) {
                    throw ExplosionError("short_vectors: more than " + std::to_string(cap) +
                                         " vectors below the bound");
                }
            }
            ++fr.cur;
        } else {
            --level;
            enter_level(level);
        }
    }

    // Map back to coefficients in the original basis: v = reduced * x =
    // columns * (U x).
    std::vector<Row> out;
    out.reserve(found.size());
    for (const Row& xr : found) {
        Row c(static_cast<std::size_t>(d), 0);
        for (int r = 0; r < d; ++r) {
            Int acc = 0;
            for (int j = 0; j < d; ++j) {
                acc = intmat::checked_add(
                    acc, intmat::checked_mul(red.transform[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)],
                                             xr[static_cast<std::size_t>(j)]));
            }
            c[static_cast<std::size_t>(r)] = acc;
        }
        // keep the sign convention in original coordinates as well
        for (int j = d - 1; j >= 0; --j) {
            if (c[static_cast<std::size_t>(j)] != 0) {
                if (c[static_cast<std::size_t>(j)] < 0) {
                    for (auto& e : c) e = -e;
                }
                break;
            }
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<Row> short_vectors(const LatticeBasis& basis, double bound, std::size_t cap) {
    return short_vectors_columns(basis.columns(), bound, cap);
}

namespace {

// Hermite constants gamma_i, exact for i <= 5.
double hermite_gamma(int i) {
    switch (i) {
        case 1: return 1.0;
        case 2: return 1.1547005383792517;  // 2/sqrt(3)
        case 3: return 1.2599210498948732;  // 2^{1/3}
        case 4: return 1.4142135623730951;
        case 5: return 1.5157165665103982;  // 8^{1/5}
        default: return 1.0 + static_cast<double>(i) / 4.0;
    }
}

// Unimodular integer T with first column equal to the primitive vector c:
// reduce c to e_1 by elementary row ops while multiplying their inverses
// onto T, so T e_1 = c throughout.
Matrix unimodular_with_first_column(const Row& c) {
    const std::size_t n = c.size();
    Matrix t = intmat::identity(n);
    Row cur = c;
    auto add_row = [&](std::size_t i, std::size_t j, Int q) {
        // cur_i += q cur_j  =>  t col_j -= q col_i
        cur[i] = intmat::checked_add(cur[i], intmat::checked_mul(q, cur[j]));
        for (std::size_t r = 0; r < n; ++r) {
            t[r][j] = intmat::checked_add(t[r][j], intmat::checked_mul(-q, t[r][i]));
        }
    };
    // Euclidean reduction of entries 1..n-1 against entry 0.
    for (;;) {
        std::size_t nz = n;
        for (std::size_t i = 1; i < n; ++i) {
            if (cur[i] != 0) {
                nz = i;
                break;
            }
        }
        if (nz == n) break;
        if (cur[0] == 0) {
            add_row(0, nz, 1);
            continue;
        }
        const Int q = cur[nz] / cur[0];
        add_row(nz, 0, -q);
        if (cur[nz] != 0) {
            // swap roles via adds: move the smaller remainder into slot 0
            add_row(0, nz, 1);
            add_row(nz, 0, -1);
            add_row(0, nz, 1);  // (a,b) -> (a+b, -a): effective swap with sign
        }
    }
    if (cur[0] == -1) {
        for (std::size_t r = 0; r < n; ++r) {
            t[r][0] = -t[r][0];
        }
        cur[0] = 1;
    }
    if (cur[0] != 1) throw RankError("unimodular_with_first_column: vector not primitive");
    return t;
}

// All primitive rank-`rank` subgroups of the lattice spanned by `columns`
// with covolume <= bound, as HNF coefficient matrices. Recursive projection:
// choose the sublattice's shortest vector v (Minkowski-bounded), then
// enumerate rank-1-lower subgroups of the projection to v-perp with bound
// scaled by 1/||v||.
void enumerate_rec(const Eigen::MatrixXd& columns, int rank, double bound, std::size_t cap,
                   std::set<Matrix>& out) {
    const int n = static_cast<int>(columns.cols());
    if (rank == n) {
        // only used through recursion; callers exclude rank d
        out.insert(intmat::identity(static_cast<std::size_t>(n)));
        return;
    }
    if (rank == 1) {
        for (Row& c : short_vectors_columns(columns, bound, cap)) {
            Int g = 0;
            for (Int e : c) g = std::gcd(g, e);
            if (g != 1) continue;
            out.insert(intmat::hnf({c}));
            if (out.size() > cap) {
                throw ExplosionError("enumerate_small_sublattices: result exceeds cap");
            }
        }
        return;
    }
    // Shortest vector of a rank-i sublattice of covolume V has norm at most
    // sqrt(gamma_i) V^{1/i}.
    const double vbound = std::sqrt(hermite_gamma(rank)) *
                          std::pow(bound, 1.0 / static_cast<double>(rank)) * (1.0 + 1e-9);
    for (Row& c : short_vectors_columns(columns, vbound, cap)) {
        Int g = 0;
        for (Int e : c) g = std::gcd(g, e);
        if (g != 1) continue;
        const Matrix t = unimodular_with_first_column(c);
        Eigen::MatrixXd changed(n, n);
        for (int j = 0; j < n; ++j) {
            changed.col(j).setZero();
            for (int r = 0; r < n; ++r) {
                changed.col(j) += static_cast<double>(t[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]) *
                                  columns.col(r);
            }
        }
        const double vnorm = changed.col(0).norm();
        // orthonormal coordinates: R factor of the changed basis; rows 1..n-1
        // of columns 1..n-1 give the projection onto v-perp
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(changed);
        const Eigen::MatrixXd r =
            qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
        const Eigen::MatrixXd projected = r.bottomRightCorner(n - 1, n - 1);
        std::set<Matrix> sub;
        enumerate_rec(projected, rank - 1, bound / vnorm * (1.0 + 1e-12), cap, sub);
        for (const Matrix& rows : sub) {
            Matrix stacked{c};
            for (const Row& row : rows) {
                Row lifted(static_cast<std::size_t>(n), 0);
                for (std::size_t j = 0; j < row.size(); ++j) {
                    for (std::size_t rr = 0; rr < static_cast<std::size_t>(n); ++rr) {
                        lifted[rr] = intmat::checked_add(
                            lifted[rr], intmat::checked_mul(row[j], t[rr][j + 1]));
                    }
                }
                stacked.push_back(std::move(lifted));
            }
            if (covolume_columns(columns, stacked) > bound * (1.0 + 1e-12)) continue;
            if (intmat::gcd_maximal_minors(stacked) != 1) continue;
            out.insert(intmat::hnf(stacked));
            if (out.size() > cap) {
                throw ExplosionError("enumerate_small_sublattices: result exceeds cap");
            }
        }
    }
}

}  // namespace

std::vector<Sublattice> enumerate_small_sublattices(const LatticeBasis& basis, int rank,
                                                    double covolume_bound, std::size_t cap) {
    const int d = basis.dim();
    if (rank < 1 || rank > d - 1) throw DomainError("enumerate_small_sublattices: bad rank");
    if (!(covolume_bound > 0.0)) throw DomainError("enumerate_small_sublattices: bad bound");
    std::set<Matrix> canon;
    enumerate_rec(basis.columns(), rank, covolume_bound, cap, canon);
    std::vector<Sublattice> out;
    out.reserve(canon.size());
    for (const Matrix& m : canon) out.push_back(Sublattice{rank, m});
    return out;
}

long primitive_vector_count(const LatticeBasis& basis, double radius) {
    long count = 0;
    for (const Row& c : short_vectors(basis, radius)) {
        Int g = 0;
        for (Int e : c) g = std::gcd(g, e);
        if (g == 1) count += 2;  // v and -v
    }
    return count;
}

Matrix hnf_canonicalize(const Matrix& coeffs) { return intmat::hnf(coeffs); }

SubOrMarker saturate_coeffs(const Matrix& coeffs, int d) {
    const int r = intmat::rank(coeffs);
    if (r == 0) return SubOrMarker{SubKind::Zero, {}};
    if (r != static_cast<int>(coeffs.size())) {
        throw RankError("saturate_coeffs: rows are dependent");
    }
    if (r == d) return SubOrMarker{SubKind::Full, {}};
    Matrix sat = intmat::saturation(coeffs);
    return SubOrMarker{SubKind::Proper, Sublattice{r, intmat::hnf(sat)}};
}

Sublattice saturate(const Sublattice& sub, int d) {
    auto res = saturate_coeffs(sub.coeffs, d);
    if (res.kind != SubKind::Proper) {
        throw RankError("saturate: rank-d or rank-0 result has no Sublattice form");
    }
    return res.sub;
}

intmat::Int saturation_index(const Matrix& coeffs) { return intmat::gcd_maximal_minors(coeffs); }

std::pair<SubOrMarker, SubOrMarker> sum_and_intersection(const Sublattice& a, const Sublattice& b,
                                                         int d) {
    Matrix stacked = a.coeffs;
    for (const Row& r : b.coeffs) stacked.push_back(r);
    // sum: saturation of the row span of the stack
    SubOrMarker sum;
    {
        const int r = intmat::rank(stacked);
        if (r == d) {
            sum = SubOrMarker{SubKind::Full, {}};
        } else {
            // reduce the stack to independent rows first
            Matrix indep;
            for (const Row& row : stacked) {
                Matrix trial = indep;
                trial.push_back(row);
                if (intmat::rank(trial) == static_cast<int>(trial.size())) indep = std::move(trial);
            }
            sum = saturate_coeffs(indep, d);
        }
    }
    // intersection: vectors rationally inside both spans
    SubOrMarker inter;
    {
        Matrix ka = intmat::kernel_basis(a.coeffs);
        Matrix kb = intmat::kernel_basis(b.coeffs);
        Matrix constraints = ka;
        for (const Row& r : kb) constraints.push_back(r);
        if (constraints.empty()) {
            inter = SubOrMarker{SubKind::Full, {}};
        } else {
            Matrix k = intmat::kernel_basis(constraints);
            if (k.empty()) {
                inter = SubOrMarker{SubKind::Zero, {}};
            } else if (static_cast<int>(k.size()) == d) {
                inter = SubOrMarker{SubKind::Full, {}};
            } else {
                inter = SubOrMarker{SubKind::Proper,
                                    Sublattice{static_cast<int>(k.size()), intmat::hnf(k)}};
            }
        }
    }
    return {sum, inter};
}

}  // namespace walkdrift::lat

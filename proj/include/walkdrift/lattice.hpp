#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "walkdrift/intmat.hpp"

namespace walkdrift::lat {

// Unimodular lattice in R^d given by basis columns; |det| must be 1 within
// 1e-9 and the condition number below 1e12 (geometry is meaningless past
// that), both checked at construction.
class LatticeBasis {
  public:
    static LatticeBasis from_columns(Eigen::MatrixXd columns);
    static LatticeBasis identity(int d);

    int dim() const { return static_cast<int>(columns_.cols()); }
    const Eigen::MatrixXd& columns() const { return columns_; }
    double condition_number() const { return condition_; }

    Eigen::VectorXd vector_from_coeffs(const intmat::Row& coeffs) const;

  private:
    explicit LatticeBasis(Eigen::MatrixXd columns, double condition)
        : columns_(std::move(columns)), condition_(condition) {}
    Eigen::MatrixXd columns_;
    double condition_;
};

// Primitive finite-rank subgroup, rows = integer coordinates of generators in
// the ambient basis, stored in row-style HNF (the unique representative).
struct Sublattice {
    int rank;
    intmat::Matrix coeffs;

    friend bool operator==(const Sublattice& a, const Sublattice& b) {
        return a.rank == b.rank && a.coeffs == b.coeffs;
    }
};

// Ranks 0 and d have no Sublattice representation; ops that can land there
// return a marker instead.
enum class SubKind { Proper, Zero, Full };
struct SubOrMarker {
    SubKind kind;
    Sublattice sub;  // meaningful iff kind == Proper
};

struct LllResult {
    LatticeBasis basis;        // reduced, same lattice
    intmat::Matrix transform;  // integer, det +-1, reduced = input * transform
};

// Lovasz condition with delta = 0.99; throws NumericalRankError when the
// Gram-Schmidt norms collapse.
LllResult lll_reduce(const LatticeBasis& basis, double delta = 0.99);

// ||a_1 ^ ... ^ a_i|| via QR of the real generators.
double covolume(const LatticeBasis& basis, const Sublattice& sub);
double covolume_coeffs(const LatticeBasis& basis, const intmat::Matrix& coeffs);
// Same computation on raw columns (no unimodularity validation).
double covolume_columns(const Eigen::MatrixXd& columns, const intmat::Matrix& coeffs);

// Conservative lower bound on the first minimum (min Gram-Schmidt norm of an
// LLL-reduced basis).
double first_minimum_lower_bound(const LatticeBasis& basis);

// All nonzero lattice vectors of norm <= bound, one per +- pair, as integer
// coefficient vectors in the ambient basis; exhaustive by Fincke-Pohst
// enumeration over the LLL-reduced Gram form. Throws ExplosionError past cap.
std::vector<intmat::Row> short_vectors(const LatticeBasis& basis, double bound,
                                       std::size_t cap = 1000000);

// All primitive rank-`rank` sublattices with covolume <= covolume_bound,
// HNF-deduplicated. Completeness comes from the reduced-basis norm bound
// i^{3/2} c_i V / m^{i-1} (c_i a Hermite-constant power, m the first-minimum
// lower bound) fed to short_vectors; validated against brute force in tests.
std::vector<Sublattice> enumerate_small_sublattices(const LatticeBasis& basis, int rank,
                                                    double covolume_bound,
                                                    std::size_t cap = 1000000);

// Number of primitive lattice vectors of norm <= radius, counting both signs
// (the Siegel-transform statistic for the indicator of a ball).
long primitive_vector_count(const LatticeBasis& basis, double radius);

// Unique row-style HNF with positive pivots; RankError on dependent rows.
intmat::Matrix hnf_canonicalize(const intmat::Matrix& coeffs);

// Smallest primitive sublattice containing the row span (rank d gives Full).
SubOrMarker saturate_coeffs(const intmat::Matrix& coeffs, int d);
Sublattice saturate(const Sublattice& sub, int d);

// Index of the row span inside its saturation: covolume(sub) =
// index * covolume(saturate(sub)).
intmat::Int saturation_index(const intmat::Matrix& coeffs);

// sum = saturation of the row stack, intersection via integer kernels; both
// HNF-canonical, with rank-0/rank-d results returned as markers.
std::pair<SubOrMarker, SubOrMarker> sum_and_intersection(const Sublattice& a, const Sublattice& b,
                                                         int d);

}  // namespace walkdrift::lat

#pragma once

// Exact integer matrix helpers for sublattice bookkeeping: row-style Hermite
// normal form, integer kernels, saturation, determinantal divisors. Entries
// are 64-bit with overflow-checked arithmetic (throws on overflow rather than
// wrapping); intermediates that need it go through 128 bits.

#include <cstdint>
#include <vector>

namespace walkdrift::intmat {

using Int = long long;
using Row = std::vector<Int>;
using Matrix = std::vector<Row>;  // row-major, rows = generators

Int checked_add(Int a, Int b);
Int checked_mul(Int a, Int b);

std::size_t rows(const Matrix& m);
std::size_t cols(const Matrix& m);

Matrix identity(std::size_t n);
Matrix transpose(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);

// Rank over the rationals (fraction-free elimination on a copy).
int rank(const Matrix& m);

// Unique row-style Hermite normal form of a full-row-rank matrix: row echelon
// with positive pivots and entries above each pivot reduced into [0, pivot).
// Throws RankError when the rows are dependent.
Matrix hnf(const Matrix& m);

// Basis of {u in Z^c : M u = 0} as rows; empty when the kernel is trivial.
// The result spans the full kernel lattice (it is saturated by construction).
Matrix kernel_basis(const Matrix& m);

// Smallest saturated subgroup containing the row span: kernel of the kernel.
// Input must have full row rank.
Matrix saturation(const Matrix& m);

// gcd of all maximal (rank x rank) minors; equals the index of the row span
// inside its saturation. 1 iff the rows generate a primitive subgroup.
Int gcd_maximal_minors(const Matrix& m);

// Exact determinant of a square integer matrix (Bareiss elimination).
Int determinant(const Matrix& m);

}  // namespace walkdrift::intmat

#include "walkdrift/intmat.hpp"

#include <algorithm>
#include <numeric>

#include "walkdrift/errors.hpp"

namespace walkdrift::intmat {

namespace {

[[noreturn]] void overflow() { throw Error("integer overflow in exact lattice arithmetic"); }

// Extended gcd: returns g = gcd(a,b) >= 0 with s*a + t*b = g.
struct ExtGcd {
    Int g, s, t;
};

ExtGcd extgcd(Int a, Int b) {
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        const Int q = old_r / r;
        Int tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    return {old_r, old_s, old_t};
}

Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// row_i := u*row_i + v*row_j (in place), overflow checked.
void combine(Row& ri, const Row& rj, Int u, Int v) {
    for (std::size_t k = 0; k < ri.size(); ++k) {
        ri[k] = checked_add(checked_mul(u, ri[k]), checked_mul(v, rj[k]));
    }
}

}  // namespace

Int checked_add(Int a, Int b) {
    Int out;
    if (__builtin_add_overflow(a, b, &out)) overflow();
    return out;
}

Int checked_mul(Int a, Int b) {
    Int out;
    if (__builtin_mul_overflow(a, b, &out)) overflow();
    return out;
}

std::size_t rows(const Matrix& m) { return m.size(); }
std::size_t cols(const Matrix& m) { return m.empty() ? 0 : m.front().size(); }

Matrix identity(std::size_t n) {
    Matrix m(n, Row(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Matrix transpose(const Matrix& m) {
    Matrix out(cols(m), Row(rows(m), 0));
    for (std::size_t i = 0; i < rows(m); ++i) {
        for (std::size_t j = 0; j < cols(m); ++j) out[j][i] = m[i][j];
    }
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (cols(a) != rows(b)) throw Error("intmat::multiply: shape mismatch");
    Matrix out(rows(a), Row(cols(b), 0));
    for (std::size_t i = 0; i < rows(a); ++i) {
        for (std::size_t k = 0; k < cols(a); ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < cols(b); ++j) {
                out[i][j] = checked_add(out[i][j], checked_mul(a[i][k], b[k][j]));
            }
        }
    }
    return out;
}

namespace {

// Row echelon reduction by unimodular operations; returns the echelon matrix
// and the number of pivots. When accumulate != nullptr the same row
// operations are applied to it (used for kernel computation).
int echelonize(Matrix& m, Matrix* accumulate) {
    const std::size_t r = rows(m), c = cols(m);
    std::size_t row = 0;
    for (std::size_t col = 0; col < c && row < r; ++col) {
        // move a nonzero entry into position, then gcd-out the column below
        std::size_t pivot = row;
        while (pivot < r && m[pivot][col] == 0) ++pivot;
        if (pivot == r) continue;
        std::swap(m[pivot], m[row]);
        if (accumulate) std::swap((*accumulate)[pivot], (*accumulate)[row]);
        for (std::size_t i = row + 1; i < r; ++i) {
            if (m[i][col] == 0) continue;
            const Int a = m[row][col], b = m[i][col];
            const auto [g, s, t] = extgcd(a, b);
            const Int u = a / g, v = b / g;
            // pivot' = s*pivot + t*row_i carries the gcd; row_i' kills the col.
            // The 2x2 op matrix [[s,t],[-b/g,a/g]] has determinant 1.
            Row new_top = m[row];
            combine(new_top, m[i], s, t);
            combine(m[i], m[row], u, -v);
            m[row] = std::move(new_top);
            if (accumulate) {
                Row acc_top = (*accumulate)[row];
                combine(acc_top, (*accumulate)[i], s, t);
                combine((*accumulate)[i], (*accumulate)[row], u, -v);
                (*accumulate)[row] = std::move(acc_top);
            }
        }
        if (m[row][col] < 0) {
            for (auto& x : m[row]) x = -x;
            if (accumulate) {
                for (auto& x : (*accumulate)[row]) x = -x;
            }
        }
        ++row;
    }
    return static_cast<int>(row);
}

}  // namespace

int rank(const Matrix& m) {
    Matrix copy = m;
    return echelonize(copy, nullptr);
}

Matrix hnf(const Matrix& m) {
    if (m.empty()) return m;
    Matrix h = m;
    const int pivots = echelonize(h, nullptr);
    if (pivots != static_cast<int>(rows(m))) {
        throw RankError("hnf: rows are linearly dependent");
    }
    // reduce entries above each pivot into [0, pivot)
    const std::size_t c = cols(h);
    for (std::size_t row = 0; row < rows(h); ++row) {
        std::size_t col = 0;
        while (col < c && h[row][col] == 0) ++col;
        for (std::size_t i = 0; i < row; ++i) {
            const Int q = floor_div(h[i][col], h[row][col]);
            if (q != 0) combine(h[i], h[row], 1, -q);
        }
    }
    return h;
}

Matrix kernel_basis(const Matrix& m) {
    // Row-reduce the transpose while accumulating the transform: rows of U
    // whose echelon image is zero span {u : M u = 0}.
    Matrix t = transpose(m);
    Matrix u = identity(rows(t));
    const int pivots = echelonize(t, &u);
    Matrix kernel;
    for (std::size_t i = static_cast<std::size_t>(pivots); i < rows(t); ++i) {
        kernel.push_back(u[i]);
    }
    return kernel.empty() ? kernel : hnf(kernel);
}

Matrix saturation(const Matrix& m) {
    const int r = rank(m);
    if (r != static_cast<int>(rows(m))) throw RankError("saturation: rows dependent");
    const Matrix k = kernel_basis(m);
    if (k.empty()) return identity(cols(m));  // full rank: saturation is Z^c
    return kernel_basis(k);
}

Int determinant(const Matrix& m) {
    const std::size_t n = rows(m);
    if (n == 0) return 1;
    if (cols(m) != n) throw Error("determinant: not square");
    // Bareiss fraction-free elimination; divisions are exact.
    Matrix a = m;
    Int sign = 1;
    Int prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && a[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(a[k], a[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                const Int num =
                    checked_add(checked_mul(a[i][j], a[k][k]), -checked_mul(a[i][k], a[k][j]));
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    return checked_mul(sign, a[n - 1][n - 1]);
}

Int gcd_maximal_minors(const Matrix& m) {
    const std::size_t r = rows(m), c = cols(m);
    if (r == 0 || r > c) throw Error("gcd_maximal_minors: need 1 <= rows <= cols");
    std::vector<std::size_t> pick(r);
    for (std::size_t i = 0; i < r; ++i) pick[i] = i;
    Int g = 0;
    for (;;) {
        Matrix minor(r, Row(r));
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) minor[i][j] = m[i][pick[j]];
        }
        g = std::gcd(g, determinant(minor));
        if (g == 1) return 1;
        // next combination
        std::size_t i = r;
        while (i > 0) {
            --i;
            if (pick[i] != i + c - r) {
                ++pick[i];
                for (std::size_t j = i + 1; j < r; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return g < 0 ? -g : g;
        }
    }
}

}  // namespace walkdrift::intmat

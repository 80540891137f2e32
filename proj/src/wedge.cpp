#include "walkdrift/wedge.hpp"

#include <cmath>

#include "walkdrift/errors.hpp"

namespace walkdrift::wedge {

std::vector<std::vector<int>> subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > d) return out;
    std::vector<int> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
    for (;;) {
        out.push_back(pick);
        int i = k;
        bool done = true;
        while (i > 0) {
            --i;
            if (pick[static_cast<std::size_t>(i)] != i + d - k) {
                ++pick[static_cast<std::size_t>(i)];
                for (int j = i + 1; j < k; ++j) {
                    pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
                }
                done = false;
                break;
            }
        }
        if (done) break;
    }
    return out;
}

Eigen::MatrixXd wedge_matrix(const Eigen::MatrixXd& g, int k) {
    const int d = static_cast<int>(g.rows());
    if (g.cols() != d) throw Error("wedge_matrix: square matrix required");
    if (k < 1 || k > d) throw Error("wedge_matrix: rank out of range");
    const auto idx = subsets(d, k);
    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXd out(n, n);
    Eigen::MatrixXd minor(k, k);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    minor(i, j) = g(idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)],
                                    idx[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)]);
                }
            }
            out(a, b) = minor.determinant();
        }
    }
    return out;
}

Eigen::VectorXd wedge_of_columns(const Eigen::MatrixXd& vectors) {
    const int d = static_cast<int>(vectors.rows());
    const int k = static_cast<int>(vectors.cols());
    const auto idx = subsets(d, k);
    Eigen::VectorXd out(static_cast<int>(idx.size()));
    Eigen::MatrixXd minor(k, k);
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                minor(i, j) = vectors(idx[a][static_cast<std::size_t>(i)], j);
            }
        }
        out(static_cast<int>(a)) = minor.determinant();
    }
    return out;
}

double log_opnorm(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return std::log(svd.singularValues()(0));
}

double log_opnorm_wedge(const Eigen::MatrixXd& g, int k) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += std::log(svd.singularValues()(j));
    return acc;
}

}  // namespace walkdrift::wedge

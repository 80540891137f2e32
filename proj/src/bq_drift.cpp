#include "walkdrift/bq_drift.hpp"

#include <algorithm>
#include <cmath>

#include "walkdrift/errors.hpp"
#include "walkdrift/parallel.hpp"
#include "walkdrift/wedge.hpp"

namespace walkdrift::bq {

MatrixMeasure MatrixMeasure::make(std::vector<std::pair<Eigen::MatrixXd, double>> atoms) {
    if (atoms.empty()) throw Error("MatrixMeasure: no atoms");
    const int d = static_cast<int>(atoms.front().first.rows());
    if (d < 2) throw Error("MatrixMeasure: need d >= 2");
    double total = 0.0;
    for (const auto& [g, w] : atoms) {
        if (g.rows() != d || g.cols() != d) throw Error("MatrixMeasure: shape mismatch");
        if (!(w > 0.0)) throw Error("MatrixMeasure: weights must be positive");
        if (std::abs(std::abs(g.determinant()) - 1.0) > 1e-9) {
            throw Error("MatrixMeasure: |det| must be 1");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("MatrixMeasure: weights must sum to 1");
    MatrixMeasure mu;
    mu.d = d;
    mu.atoms = std::move(atoms);
    return mu;
}

const Eigen::MatrixXd& MatrixMeasure::sample(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& [g, w] : atoms) {
        acc += w;
        if (u < acc) return g;
    }
    return atoms.back().first;
}

Eigen::MatrixXd MatrixMeasure::sample_product(long n, Rng& rng) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
    for (long k = 0; k < n; ++k) p = sample(rng) * p;
    return p;
}

bool MatrixMeasure::is_symmetric(double tol) const {
    for (const auto& [g, w] : atoms) {
        const Eigen::MatrixXd dual = g.inverse().transpose();
        bool found = false;
        for (const auto& [h, w2] : atoms) {
            if ((dual - h).cwiseAbs().maxCoeff() < tol && std::abs(w - w2) < tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

MatrixMeasure sl2_unipotent_measure() {
    Eigen::MatrixXd L(2, 2), R(2, 2), Li(2, 2), Ri(2, 2);
    L << 1, 1, 0, 1;
    R << 1, 0, 1, 1;
    Li << 1, -1, 0, 1;
    Ri << 1, 0, -1, 1;
    return MatrixMeasure::make({{L, 0.25}, {R, 0.25}, {Li, 0.25}, {Ri, 0.25}});
}

QuasiNormParams QuasiNormParams::make(int d, double A, std::vector<double> exponents) {
    if (d < 2) throw Error("QuasiNormParams: need d >= 2");
    if (!(A > 0.0)) throw Error("QuasiNormParams: A must be positive");
    if (static_cast<int>(exponents.size()) != d - 1) {
        throw Error("QuasiNormParams: need d-1 exponents");
    }
    for (double e : exponents) {
        if (!(e > 0.0)) throw Error("QuasiNormParams: exponents must be positive");
    }
    return QuasiNormParams{d, A, std::move(exponents)};
}

namespace {

// QR-frame telescoping: evolve an orthonormal frame Q <- qr(g Q), summing the
// log diagonal of R. The running sum over the first i entries equals
// log||wedge^i(g_n..g_1)(e_1^..^e_i)|| exactly, so the estimate is stable for
// arbitrarily long products (raw SVD of the product loses sigma_j once
// sigma_j/sigma_1 drops below machine epsilon).
Eigen::VectorXd lyapunov_log_sums(const MatrixMeasure& mu, long steps, Rng& rng) {
    const int d = mu.d;
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(d);
    for (long k = 0; k < steps; ++k) {
        const Eigen::MatrixXd z = mu.sample(rng) * q;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
        q = qr.householderQ();
        for (int j = 0; j < d; ++j) {
            sums(j) += std::log(std::abs(qr.matrixQR()(j, j)));
        }
    }
    return sums;
}

}  // namespace

LyapunovEstimate estimate_lyapunov(const MatrixMeasure& mu, int rank, long steps, long trials,
                                   std::uint64_t seed) {
    if (rank < 1 || rank >= mu.d) throw DomainError("estimate_lyapunov: rank out of range");
    if (steps < 1 || trials < 1) throw DomainError("estimate_lyapunov: bad sizes");
    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        const Eigen::VectorXd sums = lyapunov_log_sums(mu, steps, rng);
        values[t] = sums.head(rank).sum() / static_cast<double>(steps);
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= std::max(1.0, static_cast<double>(trials - 1));
    return {mean, 2.5758293035489004 * std::sqrt(var / static_cast<double>(trials))};
}

std::vector<LyapunovEstimate> lyapunov_table(const MatrixMeasure& mu, long steps, long trials,
                                             std::uint64_t seed) {
    std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        sums[t] = lyapunov_log_sums(mu, steps, rng);
    });
    std::vector<LyapunovEstimate> out;
    for (int i = 1; i < mu.d; ++i) {
        double mean = 0.0;
        for (const auto& s : sums) mean += s.head(i).sum() / static_cast<double>(steps);
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (const auto& s : sums) {
            const double v = s.head(i).sum() / static_cast<double>(steps);
            var += (v - mean) * (v - mean);
        }
        var /= std::max(1.0, static_cast<double>(trials - 1));
        out.push_back({mean, 2.5758293035489004 * std::sqrt(var / static_cast<double>(trials))});
    }
    return out;
}

double phi_A(const lat::Sublattice& sub, const lat::LatticeBasis& basis,
             const QuasiNormParams& params) {
    const int i = sub.rank;
    if (i < 1 || i >= params.d) throw DomainError("phi_A: rank out of range");
    const double vol = lat::covolume(basis, sub);
    return -(params.A * static_cast<double>(i) * static_cast<double>(params.d - i) +
             std::log(vol)) /
           params.exponent(i);
}

FAResult f_A_detailed(const lat::LatticeBasis& basis, const QuasiNormParams& params) {
    FAResult result{0.0, false, {}};
    for (int i = 1; i < params.d; ++i) {
        // phi_A > 0 iff covolume < e^{-A i(d-i)}
        const double threshold =
            std::exp(-params.A * static_cast<double>(i) * static_cast<double>(params.d - i));
        for (const auto& sub : lat::enumerate_small_sublattices(basis, i, threshold)) {
            const double phi = phi_A(sub, basis, params);
            if (phi > result.value) {
                result.value = phi;
                result.has_positive_max = true;
                result.argmax = sub;
            }
        }
    }
    return result;
}

double f_A(const lat::LatticeBasis& basis, const QuasiNormParams& params) {
    return f_A_detailed(basis, params).value;
}

double variation_constant(const QuasiNormParams& params) {
    double c = 0.0;
    for (int i = 1; i < params.d; ++i) {
        c = std::max(c, static_cast<double>(i) * static_cast<double>(params.d - 1) /
                            params.exponent(i));
    }
    return c;
}

lat::LatticeBasis apply_step(const Eigen::MatrixXd& g, const lat::LatticeBasis& x) {
    Eigen::MatrixXd raw = g * x.columns();
    // reduce + rescale so iterated products keep |det| = 1 to machine
    // precision; the lattice itself is unchanged
    lat::LatticeBasis tentative = lat::LatticeBasis::from_columns(
        raw / std::pow(std::abs(raw.determinant()), 1.0 / static_cast<double>(x.dim())));
    return lat::lll_reduce(tentative).basis;
}

lat::LatticeBasis walk_lattice(const MatrixMeasure& mu, const lat::LatticeBasis& x0, long n,
                               Rng& rng) {
    lat::LatticeBasis x = x0;
    for (long k = 0; k < n; ++k) x = apply_step(mu.sample(rng), x);
    return x;
}

DecreaseReport check_probable_decrease(const MatrixMeasure& mu, const QuasiNormParams& params,
                                       long n, const std::vector<lat::LatticeBasis>& lattices,
                                       double A0, long trials, std::uint64_t seed, double lambda) {
    if (lambda <= 0.0) {
        lambda = *std::min_element(params.exponents.begin(), params.exponents.end()) / 2.0;
    }
    DecreaseReport report;
    report.lambda = lambda;
    report.n = n;
    report.min_fraction = 1.0;
    for (std::size_t li = 0; li < lattices.size(); ++li) {
        const double f_before = f_A(lattices[li], params);
        if (!(f_before > A0)) {
            report.lattices.push_back({f_before, 0.0, true});
            continue;
        }
        std::vector<char> decreased(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            Rng rng(seed + static_cast<std::uint64_t>(li) * 1000003, t);
            lat::LatticeBasis y = lattices[li];
            for (long k = 0; k < n; ++k) y = apply_step(mu.sample(rng), y);
            decreased[t] = f_A(y, params) <= f_before - static_cast<double>(n) * lambda ? 1 : 0;
        });
        long count = 0;
        for (char c : decreased) count += c;
        const double fraction = static_cast<double>(count) / static_cast<double>(trials);
        report.min_fraction = std::min(report.min_fraction, fraction);
        report.lattices.push_back({f_before, fraction, false});
    }
    return report;
}

bool check_uniqueness_at_top(const lat::LatticeBasis& basis, const QuasiNormParams& params,
                             double A0) {
    const double fa = f_A(basis, params);
    if (!(fa > A0)) throw DomainError("check_uniqueness_at_top: f_A(basis) <= A0");
    for (int i = 1; i < params.d; ++i) {
        // phi_A(Delta) >= fa - A0 iff log vol <= -A i(d-i) - lambda_i (fa - A0)
        const double log_bound = -params.A * static_cast<double>(i) *
                                     static_cast<double>(params.d - i) -
                                 params.exponent(i) * (fa - A0);
        const double vol_bound = std::exp(log_bound);
        // tolerance keeps boundary candidates visible
        const auto subs = lat::enumerate_small_sublattices(basis, i, vol_bound * (1.0 + 1e-9));
        int hits = 0;
        for (const auto& sub : subs) {
            if (phi_A(sub, basis, params) >= fa - A0) ++hits;
        }
        if (hits > 1) return false;
    }
    return true;
}

double calibrate_uniqueness_A(const std::vector<lat::LatticeBasis>& validation, int d,
                              const std::vector<double>& exponents, double A0, double A_init,
                              int max_doublings) {
    double A = A_init;
    for (int round = 0; round < max_doublings; ++round) {
        const auto params = QuasiNormParams::make(d, A, exponents);
        bool ok = true;
        for (const auto& basis : validation) {
            if (!(f_A(basis, params) > A0)) continue;  // below threshold: vacuous
            if (!check_uniqueness_at_top(basis, params, A0)) {
                ok = false;
                break;
            }
        }
        if (ok) return A;
        A *= 2.0;
    }
    throw Error("calibrate_uniqueness_A: doubling search exhausted");
}

namespace {

double log_phi_norm(const Eigen::MatrixXd& g, int rank) {
    return rank == 0 ? wedge::log_opnorm(g) : wedge::log_opnorm_wedge(g, rank);
}

}  // namespace

double truncated_log_norm_expectation(const MatrixMeasure& mu, int rank, long n, double alpha,
                                      long trials, std::uint64_t seed) {
    if (trials < 100) throw DomainError("truncated_log_norm_expectation: need >= 100 trials");
    if (rank < 0 || rank >= mu.d) throw DomainError("truncated_log_norm_expectation: bad rank");
    std::vector<double> samples(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        samples[t] = log_phi_norm(mu.sample_product(n, rng), rank);
    });
    const auto emp = dist::empirical_distribution(samples);
    return dist::truncated_tail_expectation(emp, alpha);
}

SdMunResult certify_sd_mun(const MatrixMeasure& mu, int rank, double lambda, double C, double R0,
                           long trials, std::uint64_t seed, long n_max) {
    if (!(lambda > 0.0) || !(C > 0.0)) throw DomainError("certify_sd_mun: bad lambda or C");
    // growth rate of log||Phi(g)|| per step, for the alpha selection rule
    const long probe_n = 32;
    std::vector<double> probe(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed + 17, t);
        probe[t] = log_phi_norm(mu.sample_product(probe_n, rng), rank);
    });
    double rate = 0.0;
    for (double v : probe) rate += v;
    rate /= static_cast<double>(trials) * static_cast<double>(probe_n);

    const double eta = lambda / (2.0 * C);
    const double alpha = std::min(0.45, eta / (rate + 1.0));

    SdMunResult result{false, alpha, 0, 0.0, rate,
                       dist::DriftSpec{0.0, 1.0, dist::FiniteDist::delta(0.0),
                                       dist::FiniteDist::delta(-1.0)}};
    for (long n0 = 8; n0 <= n_max; n0 *= 2) {
        std::vector<double> samples(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            Rng rng(seed + static_cast<std::uint64_t>(n0), t);
            samples[t] = C * log_phi_norm(mu.sample_product(n0, rng), rank);
        });
        const auto emp = dist::empirical_distribution(samples);
        const double truncated = dist::truncated_tail_expectation(emp, alpha);
        if (truncated <= static_cast<double>(n0) * lambda / 2.0) {
            result.certified = true;
            result.n0 = n0;
            result.truncated = truncated;
            result.spec =
                dist::build_dominating_pair(emp, R0, static_cast<double>(n0) * lambda, alpha);
            return result;
        }
    }
    return result;
}

}  // namespace walkdrift::bq

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "walkdrift/errors.hpp"
#include "walkdrift/finite_dist.hpp"
#include "walkdrift/parallel.hpp"
#include "walkdrift/rng.hpp"

namespace walkdrift::chain {

// Markov transition: a pure sampler of the next state from (state, rng
// position). exact_kernel, when set, returns the one-step law as atoms; it is
// the reference the sampler is tested against for countable-state chains.
template <class State>
struct ChainKernel {
    std::string name;
    std::function<State(const State&, Rng&)> step;
    std::function<std::vector<std::pair<State, double>>(const State&)> exact_kernel;
};

// Non-negative drift function; +inf is allowed and counts as above every
// threshold in occupation/mass statistics.
template <class State>
struct DriftFunction {
    std::string label;
    std::function<double(const State&)> eval;
    double operator()(const State& x) const { return eval(x); }
};

struct MomentParams {
    double M;        // uniform L^{1+eta} bound on |f(X1)-f(x)|
    double eta;      // > 0
    double R0;
    double lambda1;  // > 0
};

struct TrajectoryStats {
    std::uint64_t seed = 0;
    long length = 0;
    std::vector<double> thresholds;
    std::vector<long> occupation_counts;  // #{k in 1..n : f(X_k) > thresholds[j]}
    std::vector<long> return_times;       // completed returns to {f <= thresholds[0]}
    double terminal_f = 0.0;
};

struct ReturnTime {
    long time;      // horizon when censored
    bool censored;
};

struct TailProfile {
    std::vector<long> n;
    std::vector<double> tail;         // sup over probes of P̂(tau >= n)
    std::vector<double> half_width;   // binomial band at the sup probe
    std::vector<double> partial_sum;  // running sum of tail (summability diagnostic)
    std::size_t argmax_probe = 0;     // probe index achieving the sup most often
};

struct FosterReport {
    double mean_tau;
    double ci_half;
    double bound;              // f(x0)/lambda1
    double censored_fraction;
    double slack;
    bool pass;
};

struct MassEscapePoint {
    long n;
    double estimate;
    double ci_low;
    double ci_high;
    double bound;     // epsilon + f(x0)/(n lambda1)
    bool violation;   // estimate - half width exceeds bound
};

struct SdProbeReport {
    double fx;
    bool outside_K;
    dist::FiniteDist increments;
    double worst_gap;  // max over t of P̂(inc > t) - eps_dkw - P(Z > t)
    bool pass;
};

struct SdReport {
    std::vector<SdProbeReport> probes;
    double dkw_epsilon;
    bool pass;
};

struct RenewalWindow {
    bool found;
    long window;           // l
    double min_window_prob;
};

inline double binomial_half_width(double p_hat, long trials, double z) {
    return z * std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(trials));
}

// ---------------------------------------------------------------------------

template <class State>
std::vector<State> simulate(const ChainKernel<State>& kernel, const State& x0, long n,
                            std::uint64_t seed, std::uint64_t stream = 0) {
    if (n < 0) throw DomainError("simulate: n must be >= 0");
    std::vector<State> traj;
    traj.reserve(static_cast<std::size_t>(n) + 1);
    traj.push_back(x0);
    Rng rng(seed, stream);
    for (long k = 0; k < n; ++k) traj.push_back(kernel.step(traj.back(), rng));
    return traj;
}

template <class State>
ReturnTime first_return_time(const ChainKernel<State>& kernel, const DriftFunction<State>& f,
                             double R0, const State& x0, std::uint64_t seed, long horizon,
                             std::uint64_t stream = 0) {
    if (horizon < 1) throw DomainError("first_return_time: horizon must be >= 1");
    Rng rng(seed, stream);
    State x = x0;
    for (long k = 1; k <= horizon; ++k) {
        x = kernel.step(x, rng);
        if (f(x) <= R0) return {k, false};
    }
    return {horizon, true};
}

template <class State>
TailProfile return_tail_profile(const ChainKernel<State>& kernel, const DriftFunction<State>& f,
                                double R0, const std::vector<State>& probes, long trials,
                                long horizon, std::uint64_t seed, double z = 2.5758293035489004) {
    if (trials < 1) throw DomainError("return_tail_profile: trials must be >= 1");
    if (probes.empty()) throw DomainError("return_tail_profile: empty probe set");
    // survivors[p][n-1] = #{trials : tau >= n} for probe p.
    std::vector<std::vector<long>> survivors(probes.size(),
                                             std::vector<long>(static_cast<std::size_t>(horizon), 0));
    for (std::size_t p = 0; p < probes.size(); ++p) {
        std::vector<long> taus(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            const std::uint64_t stream = static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(trials) + t;
            const ReturnTime rt = first_return_time(kernel, f, R0, probes[p], seed, horizon, stream);
            taus[t] = rt.censored ? horizon + 1 : rt.time;
        });
        for (long tau : taus) {
            const long upto = std::min(tau, horizon);
            for (long n = 1; n <= upto; ++n) ++survivors[p][static_cast<std::size_t>(n - 1)];
        }
    }
    TailProfile profile;
    std::vector<long> argmax_hits(probes.size(), 0);
    double running = 0.0;
    for (long n = 1; n <= horizon; ++n) {
        std::size_t best = 0;
        for (std::size_t p = 1; p < probes.size(); ++p) {
            if (survivors[p][static_cast<std::size_t>(n - 1)] > survivors[best][static_cast<std::size_t>(n - 1)]) best = p;
        }
        const double p_hat = static_cast<double>(survivors[best][static_cast<std::size_t>(n - 1)]) /
                             static_cast<double>(trials);
        ++argmax_hits[best];
        running += p_hat;
        profile.n.push_back(n);
        profile.tail.push_back(p_hat);
        profile.half_width.push_back(binomial_half_width(p_hat, trials, z));
        profile.partial_sum.push_back(running);
    }
    profile.argmax_probe = static_cast<std::size_t>(
        std::max_element(argmax_hits.begin(), argmax_hits.end()) - argmax_hits.begin());
    return profile;
}

template <class State>
FosterReport foster_bound_check(const ChainKernel<State>& kernel, const DriftFunction<State>& f,
                                const dist::DriftSpec& spec, const State& x0, long trials,
                                long horizon, std::uint64_t seed, double slack = 0.05,
                                double z = 2.5758293035489004) {
    const double fx0 = f(x0);
    if (!(fx0 > spec.R0)) throw DomainError("foster_bound_check: f(x0) must exceed R0");
    std::vector<double> taus(static_cast<std::size_t>(trials));
    std::vector<char> censored(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const ReturnTime rt = first_return_time(kernel, f, spec.R0, x0, seed, horizon, t);
        taus[t] = static_cast<double>(rt.time);
        censored[t] = rt.censored ? 1 : 0;
    });
    long n_censored = 0;
    for (char c : censored) n_censored += c;
    const double censored_fraction = static_cast<double>(n_censored) / static_cast<double>(trials);
    if (censored_fraction > 0.01) {
        throw CensoringError("foster_bound_check: censored fraction " +
                             std::to_string(censored_fraction) + " exceeds 1%");
    }
    double mean = 0.0;
    for (double t : taus) mean += t;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double t : taus) var += (t - mean) * (t - mean);
    var /= std::max(1.0, static_cast<double>(trials - 1));
    const double ci = z * std::sqrt(var / static_cast<double>(trials));
    const double bound = fx0 / spec.lambda1;
    return FosterReport{mean, ci, bound, censored_fraction, slack,
                        mean + ci <= bound * (1.0 + slack)};
}

// (fx/lambda1)^{1+eta} + M fx/lambda1 + M1 with
// M1 = 1 + 4((M^{1/(1+eta)} + R0)^{1+eta} + M(M+R0)/lambda1).
inline double moment_bound_m1(const MomentParams& p, double fx) {
    if (!(p.eta > 0.0) || !(p.lambda1 > 0.0) || !(p.M > 0.0)) {
        throw DomainError("moment_bound_m1: M, eta, lambda1 must be positive");
    }
    const double e1 = 1.0 + p.eta;
    const double m1 = 1.0 + 4.0 * (std::pow(std::pow(p.M, 1.0 / e1) + p.R0, e1) +
                                   p.M * (p.M + p.R0) / p.lambda1);
    return std::pow(fx / p.lambda1, e1) + p.M * fx / p.lambda1 + m1;
}

template <class State>
std::vector<MassEscapePoint> mass_escape_profile(const ChainKernel<State>& kernel,
                                                 const DriftFunction<State>& f, double R,
                                                 const State& x0, const std::vector<long>& n_grid,
                                                 long trials, std::uint64_t seed, double lambda1,
                                                 double epsilon, double z = 2.5758293035489004) {
    if (n_grid.empty()) throw DomainError("mass_escape_profile: empty grid");
    std::vector<long> grid = n_grid;
    std::sort(grid.begin(), grid.end());
    const long n_max = grid.back();
    std::vector<std::vector<char>> above(static_cast<std::size_t>(trials),
                                         std::vector<char>(grid.size(), 0));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        State x = x0;
        std::size_t gi = 0;
        for (long k = 1; k <= n_max && gi < grid.size(); ++k) {
            x = kernel.step(x, rng);
            while (gi < grid.size() && grid[gi] == k) {
                above[t][gi] = f(x) > R ? 1 : 0;
                ++gi;
            }
        }
    });
    const double fx0 = f(x0);
    std::vector<MassEscapePoint> out;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        long count = 0;
        for (long t = 0; t < trials; ++t) count += above[static_cast<std::size_t>(t)][gi];
        const double p_hat = static_cast<double>(count) / static_cast<double>(trials);
        const double hw = binomial_half_width(p_hat, trials, z);
        const double bound = epsilon + fx0 / (static_cast<double>(grid[gi]) * lambda1);
        out.push_back({grid[gi], p_hat, std::max(0.0, p_hat - hw), std::min(1.0, p_hat + hw),
                       bound, p_hat - hw > bound});
    }
    return out;
}

template <class State>
double occupation_fraction(const ChainKernel<State>& kernel, const DriftFunction<State>& f,
                           double R, const State& x0, long n, std::uint64_t seed,
                           std::uint64_t stream = 0) {
    if (n < 1) throw DomainError("occupation_fraction: n must be >= 1");
    Rng rng(seed, stream);
    State x = x0;
    long count = 0;
    for (long k = 1; k <= n; ++k) {
        x = kernel.step(x, rng);
        if (f(x) > R) ++count;  // f = +inf lands here for every finite R
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

template <class State>
TrajectoryStats collect_stats(const ChainKernel<State>& kernel, const DriftFunction<State>& f,
                              const std::vector<double>& thresholds, const State& x0, long n,
                              std::uint64_t seed, std::uint64_t stream = 0) {
    if (thresholds.empty()) throw DomainError("collect_stats: need at least one threshold");
    TrajectoryStats stats;
    stats.seed = seed;
    stats.length = n;
    stats.thresholds = thresholds;
    stats.occupation_counts.assign(thresholds.size(), 0);
    Rng rng(seed, stream);
    State x = x0;
    long last_return = 0;
    bool outside = f(x) > thresholds[0];
    for (long k = 1; k <= n; ++k) {
        x = kernel.step(x, rng);
        const double fx = f(x);
        for (std::size_t j = 0; j < thresholds.size(); ++j) {
            if (fx > thresholds[j]) ++stats.occupation_counts[j];
        }
        if (fx <= thresholds[0]) {
            if (outside) {
                stats.return_times.push_back(k - last_return);
            }
            last_return = k;
            outside = false;
        } else {
            outside = true;
        }
        if (k == n) stats.terminal_f = fx;
    }
    return stats;
}

// Dominance of the one-step increment law against Z0/Z1, with a
// Dvoretzky-Kiefer-Wolfowitz band: a probe fails when some merged atom t has
// P̂(inc > t) - eps > P(Z > t).
template <class State>
SdReport verify_sd(const ChainKernel<State>& kernel, const DriftFunction<State>& f,
                   const dist::DriftSpec& spec, const std::vector<State>& probes, long trials,
                   std::uint64_t seed, double confidence = 0.99) {
    if (trials < 100) throw DomainError("verify_sd: need at least 100 trials");
    if (!(confidence > 0.0) || !(confidence < 1.0)) {
        throw DomainError("verify_sd: confidence must lie in (0,1)");
    }
    const double eps = std::sqrt(std::log(2.0 / (1.0 - confidence)) /
                                 (2.0 * static_cast<double>(trials)));
    SdReport report;
    report.dkw_epsilon = eps;
    report.pass = true;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const double fx = f(probes[p]);
        std::vector<double> increments(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            Rng rng(seed, p * static_cast<std::size_t>(trials) + t);
            const State next = kernel.step(probes[p], rng);
            increments[t] = f(next) - fx;
        });
        dist::FiniteDist emp = dist::empirical_distribution(increments);
        const bool outside = fx > spec.R0;
        const dist::FiniteDist& Z = outside ? spec.Z1 : spec.Z0;
        double worst = -std::numeric_limits<double>::infinity();
        auto consider = [&](double t) {
            worst = std::max(worst, emp.tail_gt(t) - eps - Z.tail_gt(t));
        };
        for (const auto& a : emp.atoms()) consider(a.value);
        for (const auto& a : Z.atoms()) consider(a.value);
        const bool pass = worst <= 0.0;
        report.pass = report.pass && pass;
        report.probes.push_back({fx, outside, std::move(emp), worst, pass});
    }
    return report;
}

// Smallest window l (doubling then refining) such that, from every probe, the
// chain visits K = {f <= R0} during every window {n-l,...,n}, n <= horizon,
// with empirical probability > 1 - alpha.
template <class State>
RenewalWindow renewal_window_search(const ChainKernel<State>& kernel,
                                    const DriftFunction<State>& f, double R0,
                                    const std::vector<State>& probes, double alpha, long horizon,
                                    long trials, std::uint64_t seed) {
    if (probes.empty()) throw DomainError("renewal_window_search: empty probe set");
    // visit[p][t] = sorted visit times to K for that trajectory.
    std::vector<std::vector<std::vector<long>>> visits(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
        visits[p].assign(static_cast<std::size_t>(trials), {});
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            Rng rng(seed, p * static_cast<std::size_t>(trials) + t);
            State x = probes[p];
            std::vector<long>& v = visits[p][t];
            v.push_back(0);  // probes start in K by convention of the lemma
            for (long k = 1; k <= horizon; ++k) {
                x = kernel.step(x, rng);
                if (f(x) <= R0) v.push_back(k);
            }
        });
    }
    auto window_ok = [&](long l) {
        double min_prob = 1.0;
        for (std::size_t p = 0; p < probes.size(); ++p) {
            // worst n in [l, horizon] of P(visit in [n-l, n])
            std::vector<long> miss(static_cast<std::size_t>(horizon) + 1, 0);
            for (long t = 0; t < trials; ++t) {
                const auto& v = visits[p][static_cast<std::size_t>(t)];
                // gaps between consecutive visits longer than l produce misses
                for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                    const long lo = v[i] + l + 1, hi = std::min(v[i + 1] - 1, horizon);
                    if (lo <= hi) {
                        ++miss[static_cast<std::size_t>(lo)];
                        if (hi + 1 <= horizon) --miss[static_cast<std::size_t>(hi + 1)];
                    }
                }
                const long lo = v.back() + l + 1;
                if (lo <= horizon) ++miss[static_cast<std::size_t>(lo)];
            }
            long running = 0;
            for (long n = l; n <= horizon; ++n) {
                running += miss[static_cast<std::size_t>(n)];
                // running counts trajectories with no visit in [n-l, n]
                min_prob = std::min(min_prob,
                                    1.0 - static_cast<double>(running) / static_cast<double>(trials));
            }
        }
        return min_prob;
    };
    long l = 1;
    while (l <= horizon) {
        const double prob = window_ok(l);
        if (prob > 1.0 - alpha) return {true, l, prob};
        l *= 2;
    }
    return {false, horizon, window_ok(horizon)};
}

}  // namespace walkdrift::chain

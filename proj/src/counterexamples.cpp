#include "walkdrift/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "walkdrift/errors.hpp"
#include "walkdrift/parallel.hpp"

namespace walkdrift::cx {

namespace {

// Geometric on {1,2,...} with success rate alpha: number of steps until the
// sticky state is left. Inverse-CDF form; same law as the step kernel's
// Bernoulli sequence (cross-checked against step simulation in tests).
long long sample_geometric(Rng& rng, double alpha) {
    const double u = rng.uniform_open_closed();
    const double g = std::floor(std::log(u) / std::log1p(-alpha));
    return 1 + static_cast<long long>(std::max(0.0, g));
}

// Arrival time at x_i: sum over j < i of (sojourn at x_j) + (descent m_j).
long long sample_arrival(Rng& rng, const std::vector<double>& alpha,
                         const std::vector<long long>& m, int i) {
    long long a = 0;
    for (int j = 0; j < i; ++j) a += sample_geometric(rng, alpha[j]) + m[j];
    return a;
}

double validate_checkpoint(const std::vector<double>& alpha, const std::vector<long long>& m,
                           int i, long n_i, long trials, std::uint64_t seed) {
    std::vector<char> hit(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        const long long a = sample_arrival(rng, alpha, m, i);
        const long long g = sample_geometric(rng, alpha[static_cast<std::size_t>(i)]);
        hit[t] = (a <= n_i && n_i < a + g) ? 1 : 0;
    });
    long count = 0;
    for (char h : hit) count += h;
    return static_cast<double>(count) / static_cast<double>(trials);
}

long arrival_quantile(const std::vector<double>& alpha, const std::vector<long long>& m, int i,
                      double q, long trials, std::uint64_t seed) {
    std::vector<long long> arrivals(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        arrivals[t] = sample_arrival(rng, alpha, m, i);
    });
    std::sort(arrivals.begin(), arrivals.end());
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(trials - 1));
    return static_cast<long>(arrivals[idx]);
}

double return_point(int i) { return std::ldexp(1.0, -i - 1); }  // 2^{-i-1}

}  // namespace

MassEscapeSchedule build_mass_escape_schedule(const MassEscapeOptions& options) {
    if (options.depth < 2) throw ScheduleValidationError("schedule depth must be >= 2");
    if (options.m0 < 3 || options.m1 < 2 * options.m0) {
        throw ScheduleValidationError("need m0 >= 3 and m1 >= 2 m0 for decreasing rates");
    }
    MassEscapeSchedule s;
    s.validation_seed = options.seed;
    s.validation_trials = options.validation_trials;
    for (int i = 0; i <= options.depth; ++i) s.x.push_back(return_point(i));
    s.m = {options.m0};
    s.alpha = {1.0 / (static_cast<double>(options.m0) + s.x[1])};
    s.n.assign(static_cast<std::size_t>(options.depth), 0);
    s.achieved.assign(static_cast<std::size_t>(options.depth), 0.0);
    s.target.assign(static_cast<std::size_t>(options.depth), 0.0);

    for (int i = 1; i < options.depth; ++i) {
        const double target = 1.0 - 1.0 / static_cast<double>(i);
        const double q = 1.0 - 1.0 / (4.0 * static_cast<double>(i));
        const long n_i = arrival_quantile(s.alpha, s.m, i, q, options.validation_trials,
                                          options.seed + static_cast<std::uint64_t>(i) * 7919);
        long long m_cand = (i == 1) ? options.m1 : 2 * s.m.back();
        double achieved = 0.0;
        for (;;) {
            if (m_cand > (1LL << 48)) {
                std::ostringstream msg;
                msg << "checkpoint " << i << ": doubling search exhausted (target " << target
                    << ", best " << achieved << ")";
                throw ScheduleValidationError(msg.str());
            }
            std::vector<double> alpha_try = s.alpha;
            std::vector<long long> m_try = s.m;
            m_try.push_back(m_cand);
            alpha_try.push_back(1.0 / (static_cast<double>(m_cand) + s.x[static_cast<std::size_t>(i) + 1]));
            achieved = validate_checkpoint(alpha_try, m_try, i, n_i, options.validation_trials,
                                           options.seed + static_cast<std::uint64_t>(i) * 104729);
            if (achieved >= target + 0.02 || (i == 1 && achieved >= target)) {
                s.m = std::move(m_try);
                s.alpha = std::move(alpha_try);
                break;
            }
            m_cand *= 2;
        }
        s.n[static_cast<std::size_t>(i)] = n_i;
        s.achieved[static_cast<std::size_t>(i)] = achieved;
        s.target[static_cast<std::size_t>(i)] = target;
    }
    return s;
}

chain::ChainKernel<EscState> build_mass_escape_chain(const MassEscapeSchedule& schedule) {
    auto s = std::make_shared<MassEscapeSchedule>(schedule);
    chain::ChainKernel<EscState> kernel;
    kernel.name = "mass_escape";
    kernel.step = [s](const EscState& st, Rng& rng) -> EscState {
        if (st.level < 0) return st;  // absorbed at 0
        if (st.height > 0) return EscState{st.level, st.height - 1};
        const auto lvl = static_cast<std::size_t>(st.level);
        if (lvl >= s->alpha.size()) return st;  // truncated tail: sticks forever
        if (rng.uniform() < s->alpha[lvl]) {
            return EscState{st.level + 1, s->m[lvl]};  // value 1/alpha_level
        }
        return st;
    };
    kernel.exact_kernel = [s](const EscState& st) {
        std::vector<std::pair<EscState, double>> atoms;
        if (st.level < 0) {
            atoms.emplace_back(st, 1.0);
        } else if (st.height > 0) {
            atoms.emplace_back(EscState{st.level, st.height - 1}, 1.0);
        } else {
            const auto lvl = static_cast<std::size_t>(st.level);
            if (lvl >= s->alpha.size()) {
                atoms.emplace_back(st, 1.0);
            } else {
                atoms.emplace_back(st, 1.0 - s->alpha[lvl]);
                atoms.emplace_back(EscState{st.level + 1, s->m[lvl]}, s->alpha[lvl]);
            }
        }
        return atoms;
    };
    return kernel;
}

chain::DriftFunction<EscState> mass_escape_drift(const MassEscapeSchedule& schedule) {
    auto s = std::make_shared<MassEscapeSchedule>(schedule);
    return chain::DriftFunction<EscState>{
        "f=id", [s](const EscState& st) {
            if (st.level < 0) return 0.0;
            const auto lvl = std::min<std::size_t>(static_cast<std::size_t>(st.level),
                                                   s->x.size() - 1);
            return s->x[lvl] + static_cast<double>(st.height);
        }};
}

double stay_probability(double alpha, double R) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw DomainError("stay_probability: alpha not in (0,1)");
    const double inv = 1.0 / alpha;
    if (!(inv > R)) throw DomainError("stay_probability: 1/alpha must exceed R");
    const double k = std::floor(inv - R);
    return std::pow(1.0 - alpha, k);
}

MassEscapeReport demonstrate_mass_escape(const MassEscapeSchedule& schedule, double R,
                                         long trials, std::uint64_t seed, long horizon_budget,
                                         long long step_budget) {
    if (trials < 10000) throw DomainError("demonstrate_mass_escape: need >= 1e4 trials");
    const auto kernel = build_mass_escape_chain(schedule);
    const auto f = mass_escape_drift(schedule);
    MassEscapeReport report;
    for (int i = 1; i < schedule.depth(); ++i) {
        MassEscapeCheckpoint cp{};
        cp.i = i;
        cp.alpha = schedule.alpha[static_cast<std::size_t>(i)];
        cp.slack = 1.0 / static_cast<double>(i);
        cp.unconditional = -1.0;
        const double inv = 1.0 / cp.alpha;
        if (!(inv > R)) {
            // Jumps from this checkpoint never exceed R; nothing to flag.
            cp.k = 0;
            cp.analytic = 1.0;
            cp.conditional = 1.0;
            cp.conditional_ci = 0.0;
            cp.escape_flagged = false;
            report.checkpoints.push_back(cp);
            continue;
        }
        cp.k = static_cast<long long>(std::floor(inv - R));
        cp.analytic = stay_probability(cp.alpha, R);

        // Conditional estimate: restart at x_i; by the Markov property this is
        // exactly the analytic target, free of arrival slack.
        const long cond_trials = std::max<long>(
            100, std::min<long long>(trials, step_budget / std::max<long long>(1, cp.k)));
        std::vector<char> below(static_cast<std::size_t>(cond_trials));
        const EscState start{i, 0};
        parallel_for(static_cast<std::size_t>(cond_trials), [&](std::size_t t) {
            Rng rng(seed + static_cast<std::uint64_t>(i), t);
            EscState x = start;
            for (long long k = 0; k < cp.k; ++k) x = kernel.step(x, rng);
            below[t] = f(x) <= R ? 1 : 0;
        });
        long count = 0;
        for (char b : below) count += b;
        cp.conditional = static_cast<double>(count) / static_cast<double>(cond_trials);
        cp.conditional_ci = chain::binomial_half_width(cp.conditional, cond_trials, 3.0);
        cp.escape_flagged = 1.0 - cp.conditional >= 0.5;

        // Unconditional estimate from x_0 when the horizon fits the budget.
        const long n_i = schedule.n[static_cast<std::size_t>(i)];
        const long long total = static_cast<long long>(n_i) + cp.k;
        if (total > 0 && total <= horizon_budget) {
            const long uncond_trials = std::max<long>(
                100, std::min<long long>(trials, step_budget / (2 * total)));
            std::vector<char> ubelow(static_cast<std::size_t>(uncond_trials));
            parallel_for(static_cast<std::size_t>(uncond_trials), [&](std::size_t t) {
                Rng rng(seed + 1000003 * static_cast<std::uint64_t>(i), t);
                EscState x{0, 0};
                for (long long k = 0; k < total; ++k) x = kernel.step(x, rng);
                ubelow[t] = f(x) <= R ? 1 : 0;
            });
            long ucount = 0;
            for (char b : ubelow) ucount += b;
            cp.unconditional = static_cast<double>(ucount) / static_cast<double>(uncond_trials);
        }
        if (cp.escape_flagged && report.first_flagged < 0) report.first_flagged = i;
        report.checkpoints.push_back(cp);
    }
    return report;
}

namespace {

// Paper index q = level + 3 >= 3.
inline double emp_x(long long level) { return 1.0 / static_cast<double>(level + 3); }
inline double emp_rate(long long level) {
    const double q = static_cast<double>(level + 3);
    return 1.0 / (q * std::log(q));
}
inline long long emp_jump(long long level) {
    const double q = static_cast<double>(level + 3);
    return static_cast<long long>(std::floor(q * std::sqrt(std::log(q))));
}

}  // namespace

chain::ChainKernel<EscState> build_empirical_escape_chain() {
    chain::ChainKernel<EscState> kernel;
    kernel.name = "empirical_escape";
    kernel.step = [](const EscState& st, Rng& rng) -> EscState {
        if (st.level < 0) return st;
        if (st.height > 0) return EscState{st.level, st.height - 1};
        if (rng.uniform() < emp_rate(st.level)) {
            return EscState{st.level + 1, emp_jump(st.level)};
        }
        return EscState{st.level + 1, 0};
    };
    kernel.exact_kernel = [](const EscState& st) {
        std::vector<std::pair<EscState, double>> atoms;
        if (st.level < 0) {
            atoms.emplace_back(st, 1.0);
        } else if (st.height > 0) {
            atoms.emplace_back(EscState{st.level, st.height - 1}, 1.0);
        } else {
            const double p = emp_rate(st.level);
            atoms.emplace_back(EscState{st.level + 1, 0}, 1.0 - p);
            atoms.emplace_back(EscState{st.level + 1, emp_jump(st.level)}, p);
        }
        return atoms;
    };
    return kernel;
}

chain::DriftFunction<EscState> empirical_escape_drift() {
    return chain::DriftFunction<EscState>{"f=id", [](const EscState& st) {
        if (st.level < 0) return 0.0;
        return emp_x(st.level) + static_cast<double>(st.height);
    }};
}

EmpiricalEscapeReport demonstrate_empirical_escape(double epsilon, double R, long horizon,
                                                   long trials, std::uint64_t seed) {
    if (!(epsilon > 0.0) || !(epsilon <= 1.0)) {
        throw DomainError("demonstrate_empirical_escape: epsilon must lie in (0,1]");
    }
    if (horizon < 1000) throw DomainError("demonstrate_empirical_escape: horizon must be >= 1e3");
    const auto kernel = build_empirical_escape_chain();
    const auto f = empirical_escape_drift();
    EmpiricalEscapeReport report;
    report.trajectories.assign(static_cast<std::size_t>(trials), {});
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        EscState x = empirical_escape_start();
        EmpiricalEscapeTrajectory traj{};
        traj.n0 = -1;
        long below = 0;
        for (long n = 1; n <= horizon; ++n) {
            x = kernel.step(x, rng);
            const double fx = f(x);
            if (fx <= R) ++below;
            if (fx <= 1.0) ++traj.excursions;
            traj.max_jump = std::max(traj.max_jump, x.height);
            if (!traj.detected && static_cast<double>(below) < epsilon * static_cast<double>(n)) {
                traj.detected = true;
                traj.n0 = n;
            }
            if (n == horizon) {
                traj.final_fraction = static_cast<double>(below) / static_cast<double>(n);
            }
        }
        report.trajectories[t] = traj;
    });
    long detected = 0;
    for (const auto& tr : report.trajectories) detected += tr.detected ? 1 : 0;
    report.detection_fraction = static_cast<double>(detected) / static_cast<double>(trials);
    // Borel-Cantelli divergence diagnostic for (1/(n log n)).
    double acc = 0.0;
    long next = 10;
    for (long n = 3; n <= horizon; ++n) {
        acc += 1.0 / (static_cast<double>(n) * std::log(static_cast<double>(n)));
        if (n == next || n == horizon) {
            report.divergence_grid.push_back(n);
            report.divergence_partial_sums.push_back(acc);
            next *= 10;
        }
    }
    return report;
}

}  // namespace walkdrift::cx

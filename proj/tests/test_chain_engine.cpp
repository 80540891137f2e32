#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "support/dp_oracle.hpp"
#include "walkdrift/chain.hpp"
#include "walkdrift/errors.hpp"
#include "walkdrift/real_chains.hpp"
#include "walkdrift/rng.hpp"

using namespace walkdrift;
using namespace walkdrift::chain;

namespace {

dist::FiniteDist uniform_m2_p1() { return dist::FiniteDist::uniform({-2.0, 1.0}); }

}  // namespace

TEST_CASE("simulate: deterministic translation and determinism contract") {
    const auto kernel = translation_kernel(-1.0);
    const auto traj = simulate(kernel, 3.0, 3, 7);
    REQUIRE(traj.size() == 4);
    CHECK(traj[0] == 3.0);
    CHECK(traj[1] == 2.0);
    CHECK(traj[2] == 1.0);
    CHECK(traj[3] == 0.0);

    CHECK(simulate(kernel, 5.0, 0, 1) == std::vector<double>{5.0});

    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const auto a = simulate(rk, 10.0, 500, 99);
    const auto b = simulate(rk, 10.0, 500, 99);
    CHECK(a == b);
    const auto c = simulate(rk, 10.0, 500, 100);
    CHECK(a != c);
}

TEST_CASE("first_return_time: deterministic cases") {
    const auto kernel = translation_kernel(-1.0);
    const auto f = identity_drift();
    const auto rt = first_return_time(kernel, f, 10.0, 15.0, 3, 100);
    CHECK_FALSE(rt.censored);
    CHECK(rt.time == 5);  // (f(x)-R)/lambda1 for the deterministic walk

    // A kernel staying in K returns at the first step.
    const auto stay = translation_absorbed_kernel(-1.0, 20.0);
    const auto rt2 = first_return_time(stay, f, 10.0, 5.0, 3, 100);
    CHECK(rt2.time == 1);
    CHECK_FALSE(rt2.censored);

    const auto up = translation_kernel(1.0);
    const auto rt3 = first_return_time(up, f, 10.0, 11.0, 3, 10);
    CHECK(rt3.censored);
    CHECK(rt3.time == 10);
}

TEST_CASE("return_tail_profile: immediate return and DP oracle") {
    const auto f = identity_drift();

    // Deterministic -1 kernel mapping K into K: tail vanishes from n = 2.
    const auto det = translation_absorbed_kernel(-1.0, 0.0);
    const auto prof = return_tail_profile(det, f, 10.0, std::vector<double>{4.0, 9.0}, 200, 10, 5);
    CHECK(prof.tail[0] == 1.0);  // P(tau >= 1) = 1 by convention
    for (std::size_t i = 1; i < prof.tail.size(); ++i) CHECK(prof.tail[i] == 0.0);

    // Reflected uniform{-2,+1} chain vs exact first-passage DP.
    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const long horizon = 60;
    const long trials = 20000;
    const double x0 = 6.0;
    const auto mc = return_tail_profile(rk, f, 0.0, std::vector<double>{x0}, trials, horizon, 17);
    const auto dp = dporacle::return_tail(rk, f, 0.0, x0, horizon);
    int misses = 0;
    for (long n = 1; n <= horizon; ++n) {
        const double hw = std::max(mc.half_width[n - 1], 3.0 / trials);
        if (std::abs(mc.tail[n - 1] - dp[n - 1]) > hw + 1e-9) ++misses;
    }
    CHECK(misses <= 2);

    // Binomial half-width scales like trials^{-1/2}.
    const auto small = return_tail_profile(rk, f, 0.0, std::vector<double>{x0}, 1000, 10, 17);
    const auto large = return_tail_profile(rk, f, 0.0, std::vector<double>{x0}, 16000, 10, 17);
    const double ratio = small.half_width[4] / large.half_width[4];
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("foster_bound_check: deterministic pass, DP agreement, censoring error") {
    const auto f = identity_drift();
    const auto z1 = dist::FiniteDist::delta(-1.0);
    const auto spec_det = dist::DriftSpec::make(10.0, 1.0, z1, z1);

    const auto det = translation_kernel(-1.0);
    const auto rep = foster_bound_check(det, f, spec_det, 15.0, 500, 1000, 3);
    CHECK(rep.mean_tau == doctest::Approx(5.0));
    CHECK(rep.bound == doctest::Approx(15.0));
    CHECK(rep.pass);

    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const auto spec = dist::DriftSpec::make(0.0, 0.5, uniform_m2_p1(), uniform_m2_p1());
    const auto rep2 = foster_bound_check(rk, f, spec, 20.0, 20000, 5000, 11);
    CHECK(rep2.pass);
    CHECK(rep2.bound == doctest::Approx(40.0));
    const double exact = dporacle::expected_return_time(rk, f, 0.0, 20.0);
    CHECK(rep2.mean_tau == doctest::Approx(exact).epsilon(0.01));

    const auto up = translation_kernel(1.0);
    CHECK_THROWS_AS(foster_bound_check(up, f, spec_det, 15.0, 200, 50, 3), CensoringError);
}

TEST_CASE("moment_bound_m1: worked values and monotonicity") {
    MomentParams p{1.0, 1.0, 0.0, 1.0};
    CHECK(moment_bound_m1(p, 0.0) == doctest::Approx(9.0));
    CHECK(moment_bound_m1(p, 2.0) == doctest::Approx(15.0));

    Rng rng(5, 0);
    for (int rep = 0; rep < 200; ++rep) {
        MomentParams q{0.5 + 2.0 * rng.uniform(), 0.25 + rng.uniform(), 2.0 * rng.uniform(),
                       0.25 + rng.uniform()};
        const double fx = 3.0 * rng.uniform();
        const double base = moment_bound_m1(q, fx);
        CHECK(moment_bound_m1(q, fx + 0.5) >= base);
        MomentParams qm = q;
        qm.M += 0.5;
        CHECK(moment_bound_m1(qm, fx) >= base);
        MomentParams qr = q;
        qr.R0 += 0.5;
        CHECK(moment_bound_m1(qr, fx) >= base);
        MomentParams ql = q;
        ql.lambda1 += 0.5;
        CHECK(moment_bound_m1(ql, fx) <= base);
    }
}

TEST_CASE("mass_escape_profile: deterministic passage, confinement, DP agreement") {
    const auto f = identity_drift();

    // Deterministic -1 with absorption below R0 = 10: P(f(X_n) > 10) is 1
    // until the passage time, then 0; bound epsilon + f(x0)/n holds.
    const auto det = translation_absorbed_kernel(-1.0, 10.0);
    std::vector<long> grid;
    for (long n = 10; n <= 120; n += 10) grid.push_back(n);
    const auto prof = mass_escape_profile(det, f, 10.0, 100.0, grid, 200, 3, 1.0, 0.05);
    for (const auto& pt : prof) {
        CHECK(pt.estimate == (pt.n < 90 ? 1.0 : 0.0));
        CHECK_FALSE(pt.violation);
    }

    // Chain confined to K never escapes.
    const auto confined = translation_absorbed_kernel(-1.0, 0.0);
    const auto prof2 = mass_escape_profile(confined, f, 5.0, 2.0, {1, 5, 20}, 300, 3, 1.0, 0.05);
    for (const auto& pt : prof2) CHECK(pt.estimate == 0.0);

    // Reflected chain matches the exact DP distribution of X_n within CI.
    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const auto dp = dporacle::mass_above(rk, f, 4.0, 12.0, 40);
    const auto mc = mass_escape_profile(rk, f, 4.0, 12.0, {5, 10, 20, 40}, 20000, 29, 0.5, 0.05);
    for (const auto& pt : mc) {
        const double hw = std::max(pt.estimate - pt.ci_low, 3.0 / 20000.0);
        CHECK(std::abs(pt.estimate - dp[static_cast<std::size_t>(pt.n)]) <= hw + 1e-9);
    }
}

TEST_CASE("occupation_fraction") {
    const auto f = identity_drift();
    const auto confined = translation_absorbed_kernel(-1.0, 0.0);
    CHECK(occupation_fraction(confined, f, 5.0, 3.0, 50, 3) == 0.0);

    // Deterministic -1 from R+3, absorbing at 0: steps 1,2 exceed R.
    const auto det = translation_absorbed_kernel(-1.0, 0.0);
    CHECK(occupation_fraction(det, f, 7.0, 10.0, 10, 3) == doctest::Approx(0.2));

    const auto up = translation_kernel(1.0);
    CHECK(occupation_fraction(up, f, 5.0, 6.0, 25, 3) == 1.0);
}

TEST_CASE("verify_sd: equality cases pass, upward drift fails") {
    const auto f = identity_drift();
    const auto z0 = dist::FiniteDist::uniform({-1.0, 1.0});

    // Deterministic -1 increments outside K vs Z1 = delta_{-1}.
    const auto det = translation_kernel(-1.0);
    const auto spec1 = dist::DriftSpec::make(0.0, 1.0, z0, dist::FiniteDist::delta(-1.0));
    const auto rep1 = verify_sd(det, f, spec1, std::vector<double>{3.0, 8.0}, 400, 3);
    CHECK(rep1.pass);

    // uniform{-2,+1} increments vs the same law.
    const auto iid = iid_increment_kernel(uniform_m2_p1());
    const auto spec2 = dist::DriftSpec::make(0.0, 0.5, uniform_m2_p1(), uniform_m2_p1());
    const auto rep2 = verify_sd(iid, f, spec2, std::vector<double>{5.0, 50.0}, 3000, 3);
    CHECK(rep2.pass);

    // Drift +1 outside K against a negative-mean Z1 fails at t = 0.
    const auto up = translation_kernel(1.0);
    const auto spec3 = dist::DriftSpec::make(0.0, 1.0, z0, dist::FiniteDist::delta(-1.0));
    const auto rep3 = verify_sd(up, f, spec3, std::vector<double>{4.0}, 400, 3);
    CHECK_FALSE(rep3.pass);
    CHECK(rep3.probes[0].worst_gap > 0.5);
}

TEST_CASE("renewal window exists for the certified reflected chain") {
    const auto f = identity_drift();
    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const std::vector<double> probes{0.0};
    const auto win = renewal_window_search(rk, f, 2.0, probes, 0.05, 400, 3000, 13);
    CHECK(win.found);
    CHECK(win.min_window_prob > 0.95);
    CHECK(win.window <= 128);
}

TEST_CASE("DP-oracle equivalence on random countable chains at 99% coverage") {
    Rng master(77, 0);
    int checks = 0;
    int misses = 0;
    for (int inst = 0; inst < 100; ++inst) {
        // Random sparse kernel on states 0..S-1 with a downward bias.
        const int S = 8 + static_cast<int>(master.below(12));
        std::vector<std::vector<std::pair<double, double>>> rows(static_cast<std::size_t>(S));
        for (int s = 0; s < S; ++s) {
            const int fanout = 2 + static_cast<int>(master.below(3));
            std::vector<std::pair<double, double>> row;
            double total = 0.0;
            for (int a = 0; a < fanout; ++a) {
                int target = static_cast<int>(master.below(static_cast<std::uint64_t>(S)));
                if (a == 0 && s > 0) target = s - 1;  // keep the chain recurrent-ish
                const double w = 0.2 + master.uniform();
                row.emplace_back(static_cast<double>(target), w);
                total += w;
            }
            for (auto& [t, w] : row) w /= total;
            rows[static_cast<std::size_t>(s)] = row;
        }
        ChainKernel<double> kernel;
        kernel.name = "random_instance";
        kernel.exact_kernel = [rows](const double& x) {
            std::vector<std::pair<double, double>> merged;
            for (const auto& [y, p] : rows[static_cast<std::size_t>(x)]) {
                bool found = false;
                for (auto& m : merged) {
                    if (m.first == y) {
                        m.second += p;
                        found = true;
                    }
                }
                if (!found) merged.emplace_back(y, p);
            }
            return merged;
        };
        kernel.step = [rows](const double& x, Rng& rng) {
            const auto& row = rows[static_cast<std::size_t>(x)];
            const double u = rng.uniform();
            double acc = 0.0;
            for (const auto& [y, p] : row) {
                acc += p;
                if (u < acc) return y;
            }
            return row.back().first;
        };
        const auto f = identity_drift();
        const double x0 = static_cast<double>(S - 1);
        const double R = static_cast<double>(S) / 2.0 - 0.5;
        const long n = 5 + static_cast<long>(master.below(10));
        const long trials = 2000;
        const std::uint64_t seed = master.next_u64();

        // P(f(X_n) > R)
        const auto dp_mass = dporacle::mass_above(kernel, f, R, x0, n);
        const auto mc_mass = mass_escape_profile(kernel, f, R, x0, {n}, trials, seed, 1.0, 0.0);
        ++checks;
        if (std::abs(mc_mass[0].estimate - dp_mass[static_cast<std::size_t>(n)]) >
            std::max(mc_mass[0].estimate - mc_mass[0].ci_low, 4.0 / trials)) {
            ++misses;
        }

        // P(tau >= n)
        const auto dp_tail = dporacle::return_tail(kernel, f, R, x0, n);
        const auto mc_tail =
            return_tail_profile(kernel, f, R, std::vector<double>{x0}, trials, n, seed + 1);
        ++checks;
        if (std::abs(mc_tail.tail.back() - dp_tail.back()) >
            std::max(mc_tail.half_width.back(), 4.0 / trials)) {
            ++misses;
        }

        // E[tau]
        const double dp_tau = dporacle::expected_return_time(kernel, f, R, x0);
        double mc_tau = 0.0;
        {
            std::vector<double> taus(2000);
            for (std::size_t t = 0; t < taus.size(); ++t) {
                const auto rt = first_return_time(kernel, f, R, x0, seed + 2, 100000, t);
                taus[t] = static_cast<double>(rt.time);
            }
            double mean = 0.0, var = 0.0;
            for (double t : taus) mean += t;
            mean /= static_cast<double>(taus.size());
            for (double t : taus) var += (t - mean) * (t - mean);
            var /= static_cast<double>(taus.size() - 1);
            mc_tau = mean;
            ++checks;
            if (std::abs(mean - dp_tau) > 2.5758 * std::sqrt(var / taus.size()) + 1e-9) ++misses;
        }
        (void)mc_tau;
    }
    // 99% nominal coverage; allow binomial slack on 300 intervals.
    CHECK(checks == 300);
    CHECK(misses <= 12);
}

TEST_CASE("sampler empirical law matches the exact kernel") {
    Rng master(123, 0);
    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const auto iid = iid_increment_kernel(dist::FiniteDist::uniform({-2.0, 0.0, 1.0}));
    for (const auto* kernel : {&rk, &iid}) {
        for (double x0 : {0.0, 1.0, 7.0}) {
            const auto atoms = kernel->exact_kernel(x0);
            const long trials = 20000;
            std::map<double, long> counts;
            Rng rng(master.next_u64(), 0);
            for (long t = 0; t < trials; ++t) ++counts[kernel->step(x0, rng)];
            double total_prob = 0.0;
            for (const auto& [y, p] : atoms) {
                total_prob += p;
                const double p_hat = static_cast<double>(counts[y]) / trials;
                CHECK(std::abs(p_hat - p) <= 4.0 * std::sqrt(p * (1.0 - p) / trials) + 1e-9);
            }
            CHECK(total_prob == doctest::Approx(1.0));
            long observed = 0;
            for (const auto& [y, c] : counts) observed += c;
            CHECK(observed == trials);  // no samples outside the exact support
        }
    }
}

TEST_CASE("collect_stats is reproducible and internally consistent") {
    const auto rk = reflected_increment_kernel(uniform_m2_p1());
    const auto f = identity_drift();
    const auto s1 = collect_stats(rk, f, {2.0, 5.0}, 8.0, 2000, 99);
    const auto s2 = collect_stats(rk, f, {2.0, 5.0}, 8.0, 2000, 99);
    CHECK(s1.occupation_counts == s2.occupation_counts);
    CHECK(s1.return_times == s2.return_times);
    CHECK(s1.terminal_f == s2.terminal_f);
    CHECK(s1.occupation_counts[0] >= s1.occupation_counts[1]);
    CHECK(s1.occupation_counts[0] <= s1.length);
}

#pragma once

#include <cstdint>
#include <vector>

#include "walkdrift/chain.hpp"

namespace walkdrift::cx {

// State of an escape chain. Both counterexample chains share the same
// skeleton: a countable family of sticky "return points" x_0 > x_1 > ... in
// (0,1), occasional jumps to x_{level+1} + height followed by a deterministic
// descent of -1 per step. Levels and integer heights encode the reachable
// states exactly, with the real position recovered as value() — this keeps
// the -1 descent free of floating-point drift for arbitrarily deep levels.
struct EscState {
    long long level;   // index into the return-point sequence; -1 = absorbed at 0
    long long height;  // 0 at the return point, h >= 1 during a descent

    friend bool operator==(const EscState&, const EscState&) = default;
    friend auto operator<=>(const EscState&, const EscState&) = default;
};

inline EscState absorbed_state() { return EscState{-1, 0}; }

// Concrete instantiation of the paper's escape-of-mass schedule: return
// points x_i = 2^{-i-1}, jump rates alpha_i = 1/(m_i + x_{i+1}) with integer
// m_i (so the descent from the jump target lands exactly on x_{i+1}),
// checkpoint times n_i with Monte Carlo validated P(X_{n_i} = x_i) >= 1-1/i.
struct MassEscapeSchedule {
    std::vector<double> x;            // x[i] = 2^{-i-1}; x[0] = 1/2 is the start
    std::vector<long long> m;         // m[i] integer part of 1/alpha_i
    std::vector<double> alpha;        // alpha[i] = 1/(m[i] + x[i+1])
    std::vector<long> n;              // n[i] checkpoint time, i >= 1 meaningful
    std::vector<double> achieved;     // validated P̂(X_{n_i} = x_i)
    std::vector<double> target;       // 1 - 1/i
    std::uint64_t validation_seed = 0;
    long validation_trials = 0;

    int depth() const { return static_cast<int>(alpha.size()); }
};

struct MassEscapeOptions {
    int depth = 5;                 // checkpoints 1..depth-1 are validated
    long long m0 = 125;            // rate at the start point x_0
    long long m1 = 1000;           // designated rate at x_1 (the alpha ~ 1e-3 checkpoint)
    long validation_trials = 4000;
    double arrival_quantile_slack = 0.5;  // extra fraction of 1/alpha_{i-1} added to n_i
    std::uint64_t seed = 1;
};

// Greedy doubling construction; throws ScheduleValidationError when the
// Monte Carlo checkpoint validation cannot be met.
MassEscapeSchedule build_mass_escape_schedule(const MassEscapeOptions& options);

// The paper's kernel: sticky at x_i with rate alpha_i, jump to 1/alpha_i,
// deterministic -1 descent above 1, absorbing at 0.
chain::ChainKernel<EscState> build_mass_escape_chain(const MassEscapeSchedule& schedule);

// f = Id on the real line, read off the encoded state.
chain::DriftFunction<EscState> mass_escape_drift(const MassEscapeSchedule& schedule);

// (1-alpha)^{floor(1/alpha - R)}; DomainError if 1/alpha <= R.
double stay_probability(double alpha, double R);

struct MassEscapeCheckpoint {
    int i;
    double alpha;
    long long k;               // floor(1/alpha - R)
    double analytic;           // (1-alpha)^k
    double conditional;        // P̂(X_k <= R | X_0 = x_i), restarted at the checkpoint
    double conditional_ci;     // binomial half width
    double unconditional;      // P̂(X_{n_i+k} <= R | X_0 = x_0), -1 when skipped
    double slack;              // 1/i, the paper's arrival allowance
    bool escape_flagged;       // P̂(X > R) >= 1/2 at this checkpoint
};

struct MassEscapeReport {
    std::vector<MassEscapeCheckpoint> checkpoints;
    int first_flagged = -1;
};

// Per-checkpoint comparison of P̂(X <= R) with the analytic stay probability.
// The conditional estimate restarts trajectories at x_i (the Markov property
// makes it the exact analytic target); the unconditional estimate from x_0 is
// reported for checkpoints with n_i + k_i <= horizon_budget and carries the
// 1/i arrival slack. Trial counts are clamped so a run costs at most about
// step_budget kernel steps per checkpoint.
MassEscapeReport demonstrate_mass_escape(const MassEscapeSchedule& schedule, double R,
                                         long trials, std::uint64_t seed,
                                         long horizon_budget = 200000,
                                         long long step_budget = 200000000);

// Escape-of-empirical-measures chain: levels are x_i = 1/(i+3) for the paper's
// index i+3 >= 3, jump rate 1/((i+3)log(i+3)), jump size floor((i+3)sqrt(log(i+3))).
chain::ChainKernel<EscState> build_empirical_escape_chain();
chain::DriftFunction<EscState> empirical_escape_drift();

inline EscState empirical_escape_start() { return EscState{0, 0}; }  // x_3 = 1/3

struct EmpiricalEscapeTrajectory {
    bool detected;
    long n0;               // smallest n with running fraction below epsilon; -1 if none
    double final_fraction; // running fraction at the horizon
    long excursions;       // completed returns to [0,1]
    long long max_jump;    // largest long-jump height seen
};

struct EmpiricalEscapeReport {
    std::vector<EmpiricalEscapeTrajectory> trajectories;
    double detection_fraction;
    std::vector<double> divergence_partial_sums;  // sum_{n=3}^{N} 1/(n log n) on a grid
    std::vector<long> divergence_grid;
};

EmpiricalEscapeReport demonstrate_empirical_escape(double epsilon, double R, long horizon,
                                                   long trials, std::uint64_t seed);

}  // namespace walkdrift::cx

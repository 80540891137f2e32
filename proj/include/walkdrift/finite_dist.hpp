#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace walkdrift::dist {

// Finite-support probability distribution on the reals. Atom values are
// strictly increasing, weights positive and summing to one within 1e-12.
// Values are compared exactly; callers pre-round if they want atom merging.
class FiniteDist {
  public:
    struct Atom {
        double value;
        double weight;
    };

    // Sorts, merges exactly-equal values, validates weights.
    static FiniteDist from_atoms(std::vector<Atom> atoms);
    static FiniteDist delta(double value);
    static FiniteDist uniform(std::vector<double> values);

    std::size_t size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double min_value() const { return atoms_.front().value; }
    double max_value() const { return atoms_.back().value; }

    double mean() const;

    // P(Z > t). Computed from the same top-down suffix sums that define the
    // standard realisation, so the pushforward law holds bit-for-bit.
    double tail_gt(double t) const;

    // P(Z >= t).
    double tail_ge(double t) const;

    // Suffix sums T_i = P(Z >= v_i); shares arithmetic with tail_gt/ge.
    const std::vector<double>& suffix_tails() const { return tails_; }

    bool operator==(const FiniteDist& other) const;

    // CSV with header `value,weight`, rows sorted by value.
    void write_csv(std::ostream& out) const;
    static FiniteDist read_csv(std::istream& in);

  private:
    FiniteDist() = default;
    std::vector<Atom> atoms_;
    std::vector<double> tails_;  // tails_[i] = sum of weights from i to end
};

// Right-constant non-increasing step function on (0,1] whose Lebesgue
// pushforward is a FiniteDist. Segment k covers (upper_s[k-1], upper_s[k]]
// (with upper_s[-1] = 0) and takes value[k]; upper_s is increasing with final
// entry 1, values are strictly decreasing.
struct StepRealisation {
    std::vector<double> upper_s;
    std::vector<double> value;

    double operator()(double s) const;

    // Integral over (0, min(alpha,1)], exact piecewise arithmetic.
    double integral_up_to(double alpha) const;

    // Lebesgue measure of {s in (0,1] : value(s) > t}.
    double measure_above(double t) const;
};

// Dominance certificate for condition (SD): K = {f <= R0}, increments inside
// K dominated by Z0, outside by Z1, with mean(Z1) = -lambda1 < 0.
struct DriftSpec {
    double R0;
    double lambda1;
    FiniteDist Z0;
    FiniteDist Z1;

    static DriftSpec make(double R0, double lambda1, FiniteDist Z0, FiniteDist Z1);
};

// s -> max{t : P(Z >= t) >= s} on (0,1].
StepRealisation standard_realisation(const FiniteDist& dist);

// P(lower > t) <= P(upper > t) for all t, checked at the merged atom set.
// Ties count as satisfied.
bool dominates(const FiniteDist& upper, const FiniteDist& lower);

// E[Z' 1_{(0,alpha]}] via the standard realisation.
double truncated_tail_expectation(const FiniteDist& dist, double alpha);

// Builds (Z0, Z1) from the dominance criterion: Z1 is the pushforward of
// Z' 1_{(0,alpha]} - lambda 1_{(alpha,1]} and lambda1 = lambda(1-alpha) - E.
// Throws DominanceGapError when the gap hypothesis fails (lambda1 <= 0).
DriftSpec build_dominating_pair(const FiniteDist& Z, double R0, double lambda, double alpha);

// Atoms at distinct sample values with relative-frequency weights.
FiniteDist empirical_distribution(std::span<const double> samples);

}  // namespace walkdrift::dist

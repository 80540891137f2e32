#include "walkdrift/finite_dist.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "walkdrift/errors.hpp"

namespace walkdrift::dist {

namespace {

constexpr double kWeightTol = 1e-12;

std::vector<double> suffix_sums(const std::vector<FiniteDist::Atom>& atoms) {
    std::vector<double> tails(atoms.size());
    double acc = 0.0;
    for (std::size_t i = atoms.size(); i-- > 0;) {
        acc += atoms[i].weight;
        tails[i] = acc;
    }
    // P(Z >= min value) is 1 by definition; pinning it keeps tail_gt and the
    // realisation pushforward bit-identical despite weight rounding.
    tails[0] = 1.0;
    return tails;
}

}  // namespace

FiniteDist FiniteDist::from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw Error("FiniteDist: no atoms");
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.value)) throw Error("FiniteDist: non-finite atom value");
        if (!(a.weight > 0.0)) throw Error("FiniteDist: atom weight must be positive");
        if (!merged.empty() && merged.back().value == a.value) {
            merged.back().weight += a.weight;
        } else {
            merged.push_back(a);
        }
    }
    double total = 0.0;
    for (const Atom& a : merged) total += a.weight;
    if (std::abs(total - 1.0) > kWeightTol) {
        throw Error("FiniteDist: weights sum to " + std::to_string(total) + ", not 1");
    }
    FiniteDist d;
    d.atoms_ = std::move(merged);
    d.tails_ = suffix_sums(d.atoms_);
    return d;
}

FiniteDist FiniteDist::delta(double value) { return from_atoms({{value, 1.0}}); }

FiniteDist FiniteDist::uniform(std::vector<double> values) {
    if (values.empty()) throw Error("FiniteDist: no atoms");
    const double w = 1.0 / static_cast<double>(values.size());
    std::vector<Atom> atoms;
    atoms.reserve(values.size());
    for (double v : values) atoms.push_back({v, w});
    return from_atoms(std::move(atoms));
}

double FiniteDist::mean() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.value * a.weight;
    return m;
}

double FiniteDist::tail_gt(double t) const {
    // First atom with value > t; its suffix tail is P(Z > t).
    std::size_t lo = 0, hi = atoms_.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (atoms_[mid].value > t) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo == atoms_.size() ? 0.0 : tails_[lo];
}

double FiniteDist::tail_ge(double t) const {
    std::size_t lo = 0, hi = atoms_.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (atoms_[mid].value >= t) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo == atoms_.size() ? 0.0 : tails_[lo];
}

bool FiniteDist::operator==(const FiniteDist& other) const {
    if (atoms_.size() != other.atoms_.size()) return false;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].value != other.atoms_[i].value) return false;
        if (atoms_[i].weight != other.atoms_[i].weight) return false;
    }
    return true;
}

void FiniteDist::write_csv(std::ostream& out) const {
    out << "value,weight\n";
    char buf[64];
    for (const Atom& a : atoms_) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", a.value, a.weight);
        out << buf;
    }
}

FiniteDist FiniteDist::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("value,weight", 0) != 0) {
        throw Error("FiniteDist: bad CSV header");
    }
    std::vector<Atom> atoms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("FiniteDist: bad CSV row: " + line);
        atoms.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    return from_atoms(std::move(atoms));
}

double StepRealisation::operator()(double s) const {
    // Right-constant: value on (upper_s[k-1], upper_s[k]] is value[k].
    for (std::size_t k = 0; k < upper_s.size(); ++k) {
        if (s <= upper_s[k]) return value[k];
    }
    return value.back();
}

double StepRealisation::integral_up_to(double alpha) const {
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < upper_s.size(); ++k) {
        const double hi = std::min(upper_s[k], alpha);
        if (hi > prev) acc += value[k] * (hi - prev);
        if (upper_s[k] >= alpha) break;
        prev = upper_s[k];
    }
    return acc;
}

double StepRealisation::measure_above(double t) const {
    // Values decrease with s, so {value > t} is an initial segment (0, s*].
    double measure = 0.0;
    for (std::size_t k = 0; k < upper_s.size(); ++k) {
        if (value[k] > t) {
            measure = upper_s[k];
        } else {
            break;
        }
    }
    return measure;
}

DriftSpec DriftSpec::make(double R0, double lambda1, FiniteDist Z0, FiniteDist Z1) {
    if (!(lambda1 > 0.0)) throw Error("DriftSpec: lambda1 must be positive");
    const double m = Z1.mean();
    if (!(m < 0.0)) throw Error("DriftSpec: mean(Z1) must be negative");
    if (std::abs(m + lambda1) > 1e-12) {
        throw Error("DriftSpec: lambda1 != -mean(Z1)");
    }
    return DriftSpec{R0, lambda1, std::move(Z0), std::move(Z1)};
}

StepRealisation standard_realisation(const FiniteDist& dist) {
    const auto& atoms = dist.atoms();
    const auto& tails = dist.suffix_tails();
    const std::size_t n = atoms.size();
    StepRealisation r;
    r.upper_s.reserve(n);
    r.value.reserve(n);
    // Largest value on the smallest s-interval: segment (T_{i+1}, T_i] has
    // value v_i, where T_i = P(Z >= v_i). The top endpoint is pinned to 1.
    for (std::size_t i = n; i-- > 0;) {
        r.upper_s.push_back(i == 0 ? 1.0 : tails[i]);
        r.value.push_back(atoms[i].value);
    }
    return r;
}

bool dominates(const FiniteDist& upper, const FiniteDist& lower) {
    // Tails only change at atom values; check there.
    for (const auto& a : upper.atoms()) {
        if (lower.tail_gt(a.value) > upper.tail_gt(a.value)) return false;
    }
    for (const auto& a : lower.atoms()) {
        if (lower.tail_gt(a.value) > upper.tail_gt(a.value)) return false;
    }
    return true;
}

double truncated_tail_expectation(const FiniteDist& dist, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("truncated_tail_expectation: alpha must lie in (0,1)");
    }
    return standard_realisation(dist).integral_up_to(alpha);
}

DriftSpec build_dominating_pair(const FiniteDist& Z, double R0, double lambda, double alpha) {
    if (!(lambda > 0.0)) throw DomainError("build_dominating_pair: lambda must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw DomainError("build_dominating_pair: alpha must lie in (0,1)");
    }
    if (Z.min_value() < 0.0) {
        throw DomainError("build_dominating_pair: Z must be supported on [0,inf)");
    }
    const StepRealisation zp = standard_realisation(Z);
    const double truncated = zp.integral_up_to(alpha);
    const double lambda1 = lambda * (1.0 - alpha) - truncated;
    if (!(lambda1 > 0.0)) {
        std::ostringstream msg;
        msg << "dominance gap fails: E[Z'1_(0,alpha]] = " << truncated
            << " >= lambda(1-alpha) = " << lambda * (1.0 - alpha);
        throw DominanceGapError(msg.str());
    }
    // Pushforward of Z'1_{(0,alpha]} - lambda 1_{(alpha,1]} under Lebesgue.
    std::vector<FiniteDist::Atom> atoms;
    atoms.push_back({-lambda, 1.0 - alpha});
    double prev = 0.0;
    for (std::size_t k = 0; k < zp.upper_s.size(); ++k) {
        const double hi = std::min(zp.upper_s[k], alpha);
        if (hi > prev) atoms.push_back({zp.value[k], hi - prev});
        if (zp.upper_s[k] >= alpha) break;
        prev = zp.upper_s[k];
    }
    FiniteDist Z1 = FiniteDist::from_atoms(std::move(atoms));
    return DriftSpec::make(R0, lambda1, Z, std::move(Z1));
}

FiniteDist empirical_distribution(std::span<const double> samples) {
    if (samples.empty()) throw EmptySampleError("empirical_distribution: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double w = 1.0 / static_cast<double>(sorted.size());
    std::vector<FiniteDist::Atom> atoms;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        atoms.push_back({sorted[i], static_cast<double>(j - i) * w});
        i = j;
    }
    return FiniteDist::from_atoms(std::move(atoms));
}

}  // namespace walkdrift::dist

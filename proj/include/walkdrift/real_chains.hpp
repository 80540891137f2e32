#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "walkdrift/chain.hpp"
#include "walkdrift/finite_dist.hpp"

namespace walkdrift::chain {

// x -> x + shift, deterministic.
inline ChainKernel<double> translation_kernel(double shift) {
    ChainKernel<double> k;
    k.name = "translation(" + std::to_string(shift) + ")";
    k.step = [shift](const double& x, Rng&) { return x + shift; };
    k.exact_kernel = [shift](const double& x) {
        return std::vector<std::pair<double, double>>{{x + shift, 1.0}};
    };
    return k;
}

// x -> x + shift until x <= floor_at, then absorbed.
inline ChainKernel<double> translation_absorbed_kernel(double shift, double floor_at) {
    ChainKernel<double> k;
    k.name = "translation_absorbed";
    k.step = [shift, floor_at](const double& x, Rng&) {
        return x <= floor_at ? x : x + shift;
    };
    k.exact_kernel = [shift, floor_at](const double& x) {
        return std::vector<std::pair<double, double>>{{x <= floor_at ? x : x + shift, 1.0}};
    };
    return k;
}

// i.i.d. increments drawn from a finite distribution.
inline ChainKernel<double> iid_increment_kernel(dist::FiniteDist increments) {
    ChainKernel<double> k;
    k.name = "iid_increments";
    auto inc = std::make_shared<dist::FiniteDist>(std::move(increments));
    k.step = [inc](const double& x, Rng& rng) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (const auto& a : inc->atoms()) {
            acc += a.weight;
            if (u < acc) return x + a.value;
        }
        return x + inc->atoms().back().value;
    };
    k.exact_kernel = [inc](const double& x) {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : inc->atoms()) atoms.emplace_back(x + a.value, a.weight);
        return atoms;
    };
    return k;
}

// i.i.d. increments reflected at zero: X' = max(X + inc, 0).
inline ChainKernel<double> reflected_increment_kernel(dist::FiniteDist increments) {
    ChainKernel<double> k;
    k.name = "reflected_increments";
    auto inc = std::make_shared<dist::FiniteDist>(std::move(increments));
    k.step = [inc](const double& x, Rng& rng) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (const auto& a : inc->atoms()) {
            acc += a.weight;
            if (u < acc) return std::max(x + a.value, 0.0);
        }
        return std::max(x + inc->atoms().back().value, 0.0);
    };
    k.exact_kernel = [inc](const double& x) {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : inc->atoms()) {
            const double y = std::max(x + a.value, 0.0);
            bool merged = false;
            for (auto& existing : atoms) {
                if (existing.first == y) {
                    existing.second += a.weight;
                    merged = true;
                    break;
                }
            }
            if (!merged) atoms.emplace_back(y, a.weight);
        }
        return atoms;
    };
    return k;
}

inline DriftFunction<double> identity_drift() {
    return DriftFunction<double>{"f=id", [](const double& x) { return x; }};
}

}  // namespace walkdrift::chain

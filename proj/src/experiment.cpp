#include "walkdrift/experiment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "walkdrift/csv.hpp"

#include "walkdrift/errors.hpp"
#include "walkdrift/parallel.hpp"

namespace walkdrift::exp {

double siegel_reference_d2(double radius) {
    return 6.0 * radius * radius / std::numbers::pi;
}

SiegelReport siegel_equidistribution(const bq::MatrixMeasure& mu, const lat::LatticeBasis& x0,
                                     long steps, double radius, long trials, std::uint64_t seed,
                                     std::optional<double> reference_override) {
    if (!(radius > 0.0)) throw DomainError("siegel_equidistribution: radius must be positive");
    if (mu.d != 2 && !reference_override) {
        throw DomainError("siegel_equidistribution: built-in reference only for d = 2");
    }
    SiegelReport report;
    report.steps = steps;
    report.trials = trials;
    report.reference = reference_override ? *reference_override : siegel_reference_d2(radius);
    report.per_trajectory.assign(static_cast<std::size_t>(trials), 0.0);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng(seed, t);
        lat::LatticeBasis x = x0;
        double acc = 0.0;
        for (long k = 0; k < steps; ++k) {
            acc += static_cast<double>(lat::primitive_vector_count(x, radius));
            x = bq::apply_step(mu.sample(rng), x);
        }
        report.per_trajectory[t] = acc / static_cast<double>(steps);
    });
    double mean = 0.0;
    for (double v : report.per_trajectory) mean += v;
    report.cesaro_average = mean / static_cast<double>(trials);
    report.relative_error = std::abs(report.cesaro_average - report.reference) / report.reference;
    return report;
}

OccupationReport occupation_experiment(const bq::MatrixMeasure& mu, const lat::LatticeBasis& x0,
                                       long steps, const std::vector<double>& R_grid,
                                       const bq::QuasiNormParams& params, std::uint64_t seed) {
    if (steps < 1000) throw DomainError("occupation_experiment: steps must be >= 1e3");
    if (R_grid.empty()) throw DomainError("occupation_experiment: empty grid");
    OccupationReport report;
    report.R_grid = R_grid;
    std::sort(report.R_grid.begin(), report.R_grid.end());
    report.steps = steps;
    std::vector<long> counts(report.R_grid.size(), 0);
    Rng rng(seed, 0);
    lat::LatticeBasis x = x0;
    for (long k = 1; k <= steps; ++k) {
        x = bq::apply_step(mu.sample(rng), x);
        const double fa = bq::f_A(x, params);
        for (std::size_t j = 0; j < report.R_grid.size(); ++j) {
            if (fa <= report.R_grid[j]) ++counts[j];
        }
    }
    for (long c : counts) {
        report.below_fraction.push_back(static_cast<double>(c) / static_cast<double>(steps));
    }
    return report;
}

std::vector<lat::LatticeBasis> sample_high_lattices_d2(const bq::QuasiNormParams& params,
                                                       long count, double f_low, double f_high,
                                                       std::uint64_t seed) {
    if (params.d != 2) throw DomainError("sample_high_lattices_d2: d must be 2");
    if (!(f_high > f_low) || !(f_low > 0.0)) throw DomainError("sample_high_lattices_d2: bad range");
    std::vector<lat::LatticeBasis> out;
    Rng rng(seed, 0);
    for (long i = 0; i < count; ++i) {
        const double f_target = f_low + (f_high - f_low) * rng.uniform();
        // rank-1 phi = (t - A)/lambda: invert for the diagonal stretch t
        const double t = params.A + params.exponent(1) * f_target;
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        Eigen::MatrixXd rot(2, 2);
        rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
        diag(0, 0) = std::exp(-t);
        diag(1, 1) = std::exp(t);
        out.push_back(lat::LatticeBasis::from_columns(rot * diag));
    }
    return out;
}

namespace {

std::vector<double> split_reals(const std::string& line) {
    std::vector<double> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

lat::LatticeBasis read_lattice_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lattice file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(split_reals(line));
    }
    if (rows.empty()) throw Error("empty lattice file '" + path + "'");
    const int d = static_cast<int>(rows.size());
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d) {
            throw Error("lattice file is not square: '" + path + "'");
        }
        for (int j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return lat::LatticeBasis::from_columns(m);
}

void write_lattice_csv(const std::string& path, const lat::LatticeBasis& basis) {
    std::string out;
    const auto& m = basis.columns();
    for (int i = 0; i < basis.dim(); ++i) {
        for (int j = 0; j < basis.dim(); ++j) {
            out += csv::format_double(m(i, j));
            out += j + 1 < basis.dim() ? "," : "\n";
        }
    }
    csv::write_text_atomic(path, out);
}

bq::MatrixMeasure read_matrix_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open measure file '" + path + "'");
    std::vector<std::pair<Eigen::MatrixXd, double>> atoms;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("weight=", 0) == 0) {
            const double w = std::stod(line.substr(7));
            const int d = static_cast<int>(rows.size());
            Eigen::MatrixXd m(d, d);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
            atoms.emplace_back(m, w);
            rows.clear();
        } else {
            rows.push_back(split_reals(line));
        }
    }
    if (!rows.empty()) throw Error("trailing matrix rows without weight in '" + path + "'");
    return bq::MatrixMeasure::make(std::move(atoms));
}

void write_matrix_measure(const std::string& path, const bq::MatrixMeasure& mu) {
    std::string out;
    for (const auto& [g, w] : mu.atoms) {
        for (int i = 0; i < mu.d; ++i) {
            for (int j = 0; j < mu.d; ++j) {
                out += csv::format_double(g(i, j));
                out += j + 1 < mu.d ? "," : "\n";
            }
        }
        out += "weight=" + csv::format_double(w) + "\n";
    }
    csv::write_text_atomic(path, out);
}

}  // namespace walkdrift::exp

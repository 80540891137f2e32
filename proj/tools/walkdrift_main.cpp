// walkdrift: seeded experiments for recurrence of random walks with drift.
//
// Subcommands: simulate, returns, mass-profile, occupation, sd-check,
// counterexample {mass|empirical}, lyapunov, drift-eval, drift-check,
// equidistribute. Every run reads a flat key=value config, embeds its hash in
// all artifacts, and writes CSV + a plain-text summary atomically.
// Exit codes: 0 pass, 1 fail, 2 config error, 3 numerical error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "walkdrift/bq_drift.hpp"
#include "walkdrift/chain.hpp"
#include "walkdrift/config.hpp"
#include "walkdrift/counterexamples.hpp"
#include "walkdrift/csv.hpp"
#include "walkdrift/errors.hpp"
#include "walkdrift/experiment.hpp"
#include "walkdrift/real_chains.hpp"

namespace {

constexpr const char* kVersion = "walkdrift 0.1.0";

using walkdrift::config::Config;
namespace chain = walkdrift::chain;
namespace cx = walkdrift::cx;
namespace bq = walkdrift::bq;
namespace lat = walkdrift::lat;
namespace exp_ = walkdrift::exp;
namespace csvio = walkdrift::csv;

struct RunContext {
    Config cfg;
    std::filesystem::path out_dir;
    std::string hash;
    std::vector<std::string> summary_lines;
    std::vector<std::pair<std::string, bool>> criteria;

    void stamp(csvio::Table& table) const {
        table.set_meta("config_hash", hash);
        table.set_meta("version", kVersion);
    }
    void note(const std::string& line) { summary_lines.push_back(line); }
    void criterion(const std::string& name, bool pass) {
        criteria.emplace_back(name, pass);
        note(std::string(pass ? "PASS" : "FAIL") + "  " + name);
    }
    bool all_pass() const {
        for (const auto& [name, ok] : criteria) {
            if (!ok) return false;
        }
        return true;
    }
    void write_summary(double wall_seconds) const {
        std::string out;
        out += std::string(kVersion) + "\n";
        out += "config_hash: " + hash + "\n";
        out += "config:\n" + cfg.render();
        for (const auto& line : summary_lines) out += line + "\n";
        out += "result: " + std::string(all_pass() ? "PASS" : "FAIL") + "\n";
        // wall time stays on its own final line so reruns differ only here
        char buf[64];
        std::snprintf(buf, sizeof(buf), "wall_seconds: %.3f\n", wall_seconds);
        out += buf;
        csvio::write_text_atomic(out_dir / "summary.txt", out);
    }
};

// Built-in real-state chains for the generic subcommands.
struct RealChain {
    chain::ChainKernel<double> kernel;
    chain::DriftFunction<double> f;
    double x0;
};

RealChain make_real_chain(const Config& cfg) {
    const std::string kind = cfg.get_string("chain.kind");
    RealChain rc;
    rc.f = chain::identity_drift();
    rc.x0 = cfg.get_double("chain.x0");
    if (kind == "translation") {
        rc.kernel = chain::translation_kernel(cfg.get_double("chain.shift", -1.0));
    } else if (kind == "reflected_uniform") {
        rc.kernel = chain::reflected_increment_kernel(
            walkdrift::dist::FiniteDist::uniform(cfg.get_double_list("chain.increments")));
    } else if (kind == "iid_uniform") {
        rc.kernel = chain::iid_increment_kernel(
            walkdrift::dist::FiniteDist::uniform(cfg.get_double_list("chain.increments")));
    } else {
        throw walkdrift::ConfigParseError("unknown chain.kind '" + kind + "'", 0);
    }
    return rc;
}

bq::MatrixMeasure make_measure(const Config& cfg) {
    const std::string kind = cfg.get_string("walk.measure", "sl2_unipotent");
    if (kind == "sl2_unipotent") return bq::sl2_unipotent_measure();
    if (kind == "file") return exp_::read_matrix_measure(cfg.get_string("walk.measure_file"));
    throw walkdrift::ConfigParseError("unknown walk.measure '" + kind + "'", 0);
}

lat::LatticeBasis make_start_lattice(const Config& cfg, int d) {
    const std::string kind = cfg.get_string("walk.x0", "identity");
    if (kind == "identity") return lat::LatticeBasis::identity(d);
    if (kind == "generic") {
        // irrational shear: dense orbit under integer walks
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
        m(0, d - 1) = std::sqrt(2.0);
        return lat::LatticeBasis::from_columns(m);
    }
    if (kind == "file") return exp_::read_lattice_csv(cfg.get_string("walk.x0_file"));
    throw walkdrift::ConfigParseError("unknown walk.x0 '" + kind + "'", 0);
}

bq::QuasiNormParams make_params(const Config& cfg, const bq::MatrixMeasure& mu,
                                std::uint64_t seed, RunContext& ctx) {
    const double A = cfg.get_double("drift.a", 1.0);
    std::vector<double> exponents;
    if (cfg.has("drift.exponents")) {
        exponents = cfg.get_double_list("drift.exponents");
    } else {
        const long steps = cfg.get_long("drift.exponent_steps", 300);
        const long trials = cfg.get_long("drift.exponent_trials", 200);
        for (const auto& est : bq::lyapunov_table(mu, steps, trials, seed + 424243)) {
            exponents.push_back(est.value);
            std::ostringstream line;
            line << "estimated exponent: " << est.value << " +- " << est.ci;
            ctx.note(line.str());
        }
    }
    return bq::QuasiNormParams::make(mu.d, A, std::move(exponents));
}

const std::set<std::string> kCommonKeys = {"seed", "out"};

std::set<std::string> with_common(std::set<std::string> keys) {
    keys.insert(kCommonKeys.begin(), kCommonKeys.end());
    return keys;
}

// ---------------------------------------------------------------------------

void run_simulate(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"chain.kind", "chain.x0", "chain.shift", "chain.increments", "sim.n"}));
    const auto rc = make_real_chain(ctx.cfg);
    const long n = ctx.cfg.get_long("sim.n");
    const auto traj = chain::simulate(rc.kernel, rc.x0, n, ctx.cfg.get_seed());
    csvio::Table table({"k", "f"});
    ctx.stamp(table);
    for (long k = 0; k <= n; ++k) {
        table.add_row({static_cast<double>(k), rc.f(traj[static_cast<std::size_t>(k)])});
    }
    table.write_atomic(ctx.out_dir / "trajectory.csv");
    ctx.criterion("trajectory written", true);
}

void run_returns(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common({"chain.kind", "chain.x0", "chain.shift",
                                            "chain.increments", "returns.r0", "returns.probes",
                                            "returns.trials", "returns.horizon"}));
    const auto rc = make_real_chain(ctx.cfg);
    const double R0 = ctx.cfg.get_double("returns.r0");
    const auto probes = ctx.cfg.get_double_list("returns.probes");
    const long trials = ctx.cfg.get_long("returns.trials", 10000);
    const long horizon = ctx.cfg.get_long("returns.horizon", 200);
    const auto prof = chain::return_tail_profile(rc.kernel, rc.f, R0, probes, trials, horizon,
                                                 ctx.cfg.get_seed());
    csvio::Table table({"n", "tail", "partial_sum"});
    ctx.stamp(table);
    for (std::size_t i = 0; i < prof.n.size(); ++i) {
        table.add_row({static_cast<double>(prof.n[i]), prof.tail[i], prof.partial_sum[i]});
    }
    table.write_atomic(ctx.out_dir / "returns.csv");
    std::ostringstream line;
    line << "argmax probe index: " << prof.argmax_probe
         << "  final partial sum: " << prof.partial_sum.back()
         << "  max half width: " << *std::max_element(prof.half_width.begin(), prof.half_width.end());
    ctx.note(line.str());
    ctx.criterion("tail profile written", true);
}

void run_mass_profile(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"chain.kind", "chain.x0", "chain.shift", "chain.increments", "mass.r", "mass.n_grid",
         "mass.trials", "mass.lambda1", "mass.epsilon"}));
    const auto rc = make_real_chain(ctx.cfg);
    std::vector<long> grid;
    for (double v : ctx.cfg.get_double_list("mass.n_grid")) grid.push_back(static_cast<long>(v));
    const auto prof = chain::mass_escape_profile(
        rc.kernel, rc.f, ctx.cfg.get_double("mass.r"), rc.x0, grid,
        ctx.cfg.get_long("mass.trials", 10000), ctx.cfg.get_seed(),
        ctx.cfg.get_double("mass.lambda1"), ctx.cfg.get_double("mass.epsilon", 0.05));
    csvio::Table table({"n", "estimate", "ci_low", "ci_high", "bound"});
    ctx.stamp(table);
    bool ok = true;
    for (const auto& pt : prof) {
        table.add_row({static_cast<double>(pt.n), pt.estimate, pt.ci_low, pt.ci_high, pt.bound});
        ok = ok && !pt.violation;
    }
    table.write_atomic(ctx.out_dir / "mass_profile.csv");
    ctx.criterion("no point exceeds the mass-conservation bound", ok);
}

void run_occupation(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"walk.measure", "walk.measure_file", "walk.x0", "walk.x0_file", "occupation.steps",
         "occupation.r_grid", "occupation.target_fraction", "drift.a", "drift.exponents",
         "drift.exponent_steps", "drift.exponent_trials"}));
    const auto mu = make_measure(ctx.cfg);
    const auto x0 = make_start_lattice(ctx.cfg, mu.d);
    const auto params = make_params(ctx.cfg, mu, ctx.cfg.get_seed(), ctx);
    const auto report = exp_::occupation_experiment(
        mu, x0, ctx.cfg.get_long("occupation.steps", 100000),
        ctx.cfg.get_double_list("occupation.r_grid"), params, ctx.cfg.get_seed());
    csvio::Table table({"R", "fraction_below", "fraction_above"});
    ctx.stamp(table);
    for (std::size_t i = 0; i < report.R_grid.size(); ++i) {
        table.add_row({report.R_grid[i], report.below_fraction[i], 1.0 - report.below_fraction[i]});
        if (i > 0) {
            // monotone non-decreasing in R by set inclusion
            if (report.below_fraction[i] + 1e-15 < report.below_fraction[i - 1]) {
                throw walkdrift::Error("occupation fractions not monotone");
            }
        }
    }
    table.write_atomic(ctx.out_dir / "occupation.csv");
    const double target = ctx.cfg.get_double("occupation.target_fraction", 0.05);
    const double best = 1.0 - report.below_fraction.back();
    std::ostringstream line;
    line << "smallest escape fraction on grid: " << best;
    ctx.note(line.str());
    ctx.criterion("some R confines the walk to fraction >= 1-target", best <= target);
}

void run_sd_check(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"chain.kind", "chain.x0", "chain.shift", "chain.increments", "sd.r0", "sd.lambda1",
         "sd.z0_csv", "sd.z1_csv", "sd.probes", "sd.trials", "sd.confidence"}));
    const auto rc = make_real_chain(ctx.cfg);
    auto load_dist = [&](const std::string& key) {
        std::ifstream in(ctx.cfg.get_string(key));
        if (!in) throw walkdrift::Error("cannot open " + ctx.cfg.get_string(key));
        return walkdrift::dist::FiniteDist::read_csv(in);
    };
    const auto spec = walkdrift::dist::DriftSpec::make(
        ctx.cfg.get_double("sd.r0"), ctx.cfg.get_double("sd.lambda1"), load_dist("sd.z0_csv"),
        load_dist("sd.z1_csv"));
    const auto report = chain::verify_sd(rc.kernel, rc.f, spec, ctx.cfg.get_double_list("sd.probes"),
                                         ctx.cfg.get_long("sd.trials", 10000), ctx.cfg.get_seed(),
                                         ctx.cfg.get_double("sd.confidence", 0.99));
    csvio::Table table({"probe_f", "outside_K", "worst_gap", "pass"});
    ctx.stamp(table);
    for (const auto& p : report.probes) {
        table.add_row({p.fx, p.outside_K ? 1.0 : 0.0, p.worst_gap, p.pass ? 1.0 : 0.0});
    }
    table.write_atomic(ctx.out_dir / "sd_check.csv");
    std::ostringstream line;
    line << "DKW band: " << report.dkw_epsilon;
    ctx.note(line.str());
    ctx.criterion("dominance holds at every probe within the DKW band", report.pass);
}

void run_counterexample_mass(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"schedule.depth", "schedule.m0", "schedule.m1", "schedule.validation_trials", "mass.r",
         "mass.trials"}));
    cx::MassEscapeOptions opt;
    opt.depth = static_cast<int>(ctx.cfg.get_long("schedule.depth", 4));
    opt.m0 = ctx.cfg.get_long("schedule.m0", 125);
    opt.m1 = ctx.cfg.get_long("schedule.m1", 1000);
    opt.validation_trials = ctx.cfg.get_long("schedule.validation_trials", 4000);
    opt.seed = ctx.cfg.get_seed();
    const auto schedule = cx::build_mass_escape_schedule(opt);

    csvio::Table sched_table({"i", "x_i", "alpha_i", "n_i"});
    ctx.stamp(sched_table);
    for (int i = 0; i < schedule.depth(); ++i) {
        sched_table.add_row({static_cast<double>(i), schedule.x[static_cast<std::size_t>(i)],
                             schedule.alpha[static_cast<std::size_t>(i)],
                             static_cast<double>(i == 0 ? 0 : schedule.n[static_cast<std::size_t>(i)])});
    }
    sched_table.write_atomic(ctx.out_dir / "schedule.csv");

    const double R = ctx.cfg.get_double("mass.r", 10.0);
    const long trials = ctx.cfg.get_long("mass.trials", 100000);
    const auto report = cx::demonstrate_mass_escape(schedule, R, trials, ctx.cfg.get_seed() + 1);
    csvio::Table table({"i", "alpha", "k", "analytic", "conditional", "conditional_ci",
                        "unconditional", "slack", "flagged"});
    ctx.stamp(table);
    bool analytic_ok = true;
    for (const auto& cp : report.checkpoints) {
        table.add_row({static_cast<double>(cp.i), cp.alpha, static_cast<double>(cp.k), cp.analytic,
                       cp.conditional, cp.conditional_ci, cp.unconditional, cp.slack,
                       cp.escape_flagged ? 1.0 : 0.0});
        if (cp.k > 0 && std::abs(cp.conditional - cp.analytic) > cp.conditional_ci + 0.01) {
            analytic_ok = false;
        }
    }
    table.write_atomic(ctx.out_dir / "checkpoints.csv");
    ctx.criterion("stay probabilities match the analytic values", analytic_ok);
    ctx.criterion("escape flagged at some checkpoint", report.first_flagged >= 0);
}

void run_counterexample_empirical(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"empirical.epsilon", "empirical.r", "empirical.horizon", "empirical.trials",
         "empirical.min_detection"}));
    const auto report = cx::demonstrate_empirical_escape(
        ctx.cfg.get_double("empirical.epsilon", 0.5), ctx.cfg.get_double("empirical.r", 0.9),
        ctx.cfg.get_long("empirical.horizon", 10000), ctx.cfg.get_long("empirical.trials", 1000),
        ctx.cfg.get_seed());
    csvio::Table table({"trajectory", "detected", "n0", "final_fraction", "excursions", "max_jump"});
    ctx.stamp(table);
    for (std::size_t t = 0; t < report.trajectories.size(); ++t) {
        const auto& tr = report.trajectories[t];
        table.add_row({static_cast<double>(t), tr.detected ? 1.0 : 0.0, static_cast<double>(tr.n0),
                       tr.final_fraction, static_cast<double>(tr.excursions),
                       static_cast<double>(tr.max_jump)});
    }
    table.write_atomic(ctx.out_dir / "empirical_escape.csv");
    csvio::Table div_table({"N", "partial_sum"});
    ctx.stamp(div_table);
    for (std::size_t i = 0; i < report.divergence_grid.size(); ++i) {
        div_table.add_row({static_cast<double>(report.divergence_grid[i]),
                           report.divergence_partial_sums[i]});
    }
    div_table.write_atomic(ctx.out_dir / "divergence.csv");
    std::ostringstream line;
    line << "detection fraction: " << report.detection_fraction;
    ctx.note(line.str());
    ctx.criterion("detection fraction meets the configured floor",
                  report.detection_fraction >=
                      ctx.cfg.get_double("empirical.min_detection", 0.0));
}

void run_lyapunov(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"walk.measure", "walk.measure_file", "lyapunov.steps", "lyapunov.trials"}));
    const auto mu = make_measure(ctx.cfg);
    const auto table_data = bq::lyapunov_table(mu, ctx.cfg.get_long("lyapunov.steps", 400),
                                               ctx.cfg.get_long("lyapunov.trials", 300),
                                               ctx.cfg.get_seed());
    csvio::Table table({"i", "lambda", "ci"});
    ctx.stamp(table);
    bool positive = true;
    for (std::size_t i = 0; i < table_data.size(); ++i) {
        table.add_row({static_cast<double>(i + 1), table_data[i].value, table_data[i].ci});
        positive = positive && table_data[i].value > 0.0;
    }
    table.write_atomic(ctx.out_dir / "exponents.csv");
    if (mu.is_symmetric() && mu.d > 2) {
        std::ostringstream line;
        line << "duality gap |l_i - l_{d-i}|: "
             << std::abs(table_data.front().value - table_data.back().value);
        ctx.note(line.str());
    }
    ctx.criterion("all exponents positive", positive);
}

void run_drift_eval(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"walk.measure", "walk.measure_file", "drift.a", "drift.exponents",
         "drift.exponent_steps", "drift.exponent_trials", "drift.lattice_csv"}));
    const auto mu = make_measure(ctx.cfg);
    const auto params = make_params(ctx.cfg, mu, ctx.cfg.get_seed(), ctx);
    const auto basis = ctx.cfg.has("drift.lattice_csv")
                           ? exp_::read_lattice_csv(ctx.cfg.get_string("drift.lattice_csv"))
                           : lat::LatticeBasis::identity(mu.d);
    const auto res = bq::f_A_detailed(basis, params);
    csvio::Table table({"f_A", "has_max", "argmax_rank", "argmax_covolume"});
    ctx.stamp(table);
    table.add_row({res.value, res.has_positive_max ? 1.0 : 0.0,
                   res.has_positive_max ? static_cast<double>(res.argmax.rank) : 0.0,
                   res.has_positive_max ? lat::covolume(basis, res.argmax) : 0.0});
    table.write_atomic(ctx.out_dir / "drift_eval.csv");
    ctx.criterion("f_A evaluated", true);
}

void run_drift_check(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"walk.measure", "walk.measure_file", "drift.a", "drift.exponents",
         "drift.exponent_steps", "drift.exponent_trials", "check.n", "check.trials",
         "check.lattices", "check.a0", "check.f_low", "check.f_high", "check.min_fraction",
         "check.lambda"}));
    const auto mu = make_measure(ctx.cfg);
    const auto params = make_params(ctx.cfg, mu, ctx.cfg.get_seed(), ctx);
    const double A0 = ctx.cfg.get_double("check.a0", 2.0);
    const long n = ctx.cfg.get_long("check.n", 50);
    const long count = ctx.cfg.get_long("check.lattices", 50);
    const double lambda = ctx.cfg.get_double("check.lambda", 0.0);
    const double min_exp = *std::min_element(params.exponents.begin(), params.exponents.end());
    const double used_lambda = lambda > 0.0 ? lambda : min_exp / 2.0;
    const double f_low = ctx.cfg.get_double(
        "check.f_low", A0 + static_cast<double>(n) * used_lambda + 2.0);
    const double f_high = ctx.cfg.get_double("check.f_high", f_low + 4.0);
    const auto lattices =
        exp_::sample_high_lattices_d2(params, count, f_low, f_high, ctx.cfg.get_seed() + 77);
    const auto report = bq::check_probable_decrease(mu, params, n, lattices, A0,
                                                    ctx.cfg.get_long("check.trials", 200),
                                                    ctx.cfg.get_seed(), lambda);
    csvio::Table table({"lattice", "f_before", "fraction", "skipped"});
    ctx.stamp(table);
    bool unique_ok = true;
    for (std::size_t i = 0; i < report.lattices.size(); ++i) {
        const auto& pl = report.lattices[i];
        table.add_row({static_cast<double>(i), pl.f_before, pl.fraction, pl.skipped ? 1.0 : 0.0});
        if (!pl.skipped) {
            unique_ok = unique_ok && bq::check_uniqueness_at_top(lattices[i], params, A0);
        }
    }
    table.write_atomic(ctx.out_dir / "drift_check.csv");
    std::ostringstream line;
    line << "n=" << report.n << " lambda=" << report.lambda
         << " min decrease fraction=" << report.min_fraction
         << " C=" << bq::variation_constant(params);
    ctx.note(line.str());
    const double floor = ctx.cfg.get_double("check.min_fraction", 0.9);
    ctx.criterion("probable decrease fraction at every lattice", report.min_fraction >= floor);
    ctx.criterion("uniqueness at top", unique_ok);
}

void run_equidistribute(RunContext& ctx) {
    ctx.cfg.require_known_keys(with_common(
        {"walk.measure", "walk.measure_file", "walk.x0", "walk.x0_file", "equi.steps",
         "equi.trials", "equi.radius", "equi.tolerance", "equi.reference_csv"}));
    const auto mu = make_measure(ctx.cfg);
    lat::LatticeBasis x0 = make_start_lattice(ctx.cfg, mu.d);
    std::optional<double> reference;
    const double radius = ctx.cfg.get_double("equi.radius", 1.0);
    if (ctx.cfg.has("equi.reference_csv")) {
        // constants file from the fundamental-domain oracle script
        std::ifstream in(ctx.cfg.get_string("equi.reference_csv"));
        if (!in) throw walkdrift::Error("cannot open reference constants file");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("r,", 0) == 0) continue;
            std::istringstream row(line);
            std::string cell;
            std::getline(row, cell, ',');
            const double r = std::stod(cell);
            std::getline(row, cell, ',');
            const double ref = std::stod(cell);
            if (std::abs(r - radius) < 1e-12) reference = ref;
        }
        if (!reference) throw walkdrift::Error("radius not found in reference constants file");
    }
    const auto report = exp_::siegel_equidistribution(
        mu, x0, ctx.cfg.get_long("equi.steps", 100000), radius,
        ctx.cfg.get_long("equi.trials", 10), ctx.cfg.get_seed(), reference);
    csvio::Table table({"trajectory", "cesaro_average"});
    ctx.stamp(table);
    for (std::size_t t = 0; t < report.per_trajectory.size(); ++t) {
        table.add_row({static_cast<double>(t), report.per_trajectory[t]});
    }
    table.write_atomic(ctx.out_dir / "equidistribution.csv");
    std::ostringstream line;
    line << "cesaro average: " << report.cesaro_average << "  reference: " << report.reference
         << "  relative error: " << report.relative_error;
    ctx.note(line.str());
    ctx.criterion("cesaro average within tolerance of the Haar reference",
                  report.relative_error <= ctx.cfg.get_double("equi.tolerance", 0.05));
}

int dispatch(const std::string& command, RunContext& ctx) {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(ctx.out_dir);
    if (command == "simulate") run_simulate(ctx);
    else if (command == "returns") run_returns(ctx);
    else if (command == "mass-profile") run_mass_profile(ctx);
    else if (command == "occupation") run_occupation(ctx);
    else if (command == "sd-check") run_sd_check(ctx);
    else if (command == "counterexample-mass") run_counterexample_mass(ctx);
    else if (command == "counterexample-empirical") run_counterexample_empirical(ctx);
    else if (command == "lyapunov") run_lyapunov(ctx);
    else if (command == "drift-eval") run_drift_eval(ctx);
    else if (command == "drift-check") run_drift_check(ctx);
    else if (command == "equidistribute") run_equidistribute(ctx);
    else throw walkdrift::ConfigParseError("unknown command '" + command + "'", 0);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ctx.write_summary(wall);
    for (const auto& [name, ok] : ctx.criteria) {
        std::cout << (ok ? "PASS  " : "FAIL  ") << name << "\n";
    }
    return ctx.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{kVersion};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    long long seed_override = -1;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--seed", seed_override, "seed override");
    app.add_option("--out", out_dir, "output directory");

    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const char* name : {"simulate", "returns", "mass-profile", "occupation", "sd-check",
                             "lyapunov", "drift-eval", "drift-check", "equidistribute"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
        subs.emplace_back(name, sub);
    }
    CLI::App* counter = app.add_subcommand("counterexample");
    counter->require_subcommand(1);
    counter->fallthrough();
    CLI::App* counter_mass = counter->add_subcommand("mass");
    CLI::App* counter_emp = counter->add_subcommand("empirical");
    counter_mass->fallthrough();
    counter_emp->fallthrough();

    CLI11_PARSE(app, argc, argv);

    std::string command;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) command = name;
    }
    if (counter->parsed()) {
        command = counter_mass->parsed() ? "counterexample-mass" : "counterexample-empirical";
        (void)counter_emp;
    }

    try {
        RunContext ctx;
        ctx.cfg = config_path.empty() ? Config::parse("") : Config::load(config_path);
        if (seed_override >= 0) {
            ctx.cfg.set("seed", std::to_string(seed_override));
        }
        if (ctx.cfg.has("out") && out_dir == "out") out_dir = ctx.cfg.get_string("out");
        ctx.out_dir = out_dir;
        ctx.hash = ctx.cfg.hash();
        return dispatch(command, ctx);
    } catch (const walkdrift::ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const walkdrift::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

// Command-line front end: traverse simulations, parameter sweeps, bandit
// bound verification and channel-statistics calibration.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "hstbeam/hstbeam.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::int64_t seed = -1;       // -1: keep config value
    int traverses = -1;           // -1: keep config value
};

hstbeam::ScenarioConfig load_config(const CommonOpts& opts) {
    hstbeam::ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg = hstbeam::load_config_file(opts.config_path);
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.traverses > 0) cfg.num_traverses = opts.traverses;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value configuration file");
    cmd->add_option("--seed", opts.seed, "override the run seed");
    cmd->add_option("--out-dir", opts.out_dir, "output directory");
    cmd->add_option("--traverses", opts.traverses, "override the number of traverses");
}

int cmd_run(const CommonOpts& opts, const std::string& policy_arg) {
    const hstbeam::ScenarioConfig cfg = load_config(opts);
    std::vector<hstbeam::Policy> policies;
    if (policy_arg == "all")
        policies = {hstbeam::Policy::bandit, hstbeam::Policy::sequential, hstbeam::Policy::genie};
    else
        policies = {hstbeam::policy_from_name(policy_arg)};

    std::vector<hstbeam::RunResult> results;
    for (hstbeam::Policy p : policies) {
        results.push_back(hstbeam::run(cfg, p));
        const hstbeam::RunResult& res = results.back();
        std::cout << "policy " << hstbeam::policy_name(p) << ": ";
        for (int t = 0; t < res.num_traverses; ++t)
            std::cout << "traverse " << t << " mean SE " << res.traverse_mean_se[t] << "  ";
        std::cout << "final regret " << res.cum_regret.back() << "\n";
        std::cout << "  wrote " << hstbeam::write_slots_csv(res, opts.out_dir) << "\n";
        if (p == hstbeam::Policy::bandit)
            std::cout << "  wrote " << hstbeam::write_bandit_state_csv(res, opts.out_dir) << "\n";
    }
    std::cout << "wrote " << hstbeam::write_summary_csv(results, opts.out_dir) << "\n";
    std::cout << "wrote " << hstbeam::write_path_histogram_csv(results.front(), opts.out_dir)
              << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts, const std::string& axis_arg,
              const std::vector<std::int64_t>& values, const std::string& policy_arg) {
    const hstbeam::ScenarioConfig cfg = load_config(opts);
    const hstbeam::SweepAxis axis = hstbeam::sweep_axis_from_name(axis_arg);
    const hstbeam::Policy policy = hstbeam::policy_from_name(policy_arg);
    for (std::int64_t v : values) hstbeam::with_sweep_value(cfg, axis, v).validate();
    const std::vector<hstbeam::RunResult> results = hstbeam::sweep(cfg, axis, values, policy);
    for (std::size_t i = 0; i < results.size(); ++i) {
        std::cout << hstbeam::sweep_axis_name(axis) << "=" << values[i] << ": ";
        for (int t = 0; t < results[i].num_traverses; ++t)
            std::cout << "traverse " << t << " mean SE " << results[i].traverse_mean_se[t] << "  ";
        std::cout << "\n";
    }
    std::cout << "wrote " << hstbeam::write_sweep_csv(axis, values, results, opts.out_dir) << "\n";
    return kExitOk;
}

int cmd_verify_bounds(const std::vector<double>& arm_means, int m, int d, double c,
                      std::int64_t horizon, int seeds, const std::string& noise,
                      const std::string& out_path) {
    hstbeam::SyntheticBanditSpec spec;
    spec.arm_means = arm_means;
    spec.num_measure = m;
    spec.num_streams = d;
    spec.exploration_c = c;
    spec.horizon = horizon;
    spec.num_seeds = seeds;
    if (noise == "bernoulli")
        spec.noise = hstbeam::RewardNoise::bernoulli;
    else if (noise == "truncated-gaussian")
        spec.noise = hstbeam::RewardNoise::truncated_gaussian;
    else
        throw hstbeam::ConfigError({"unknown noise family '" + noise + "'"});
    spec.validate();

    const hstbeam::BoundReport report = hstbeam::verify_bounds(spec);
    std::printf("%10s %4s %12s %12s %14s %14s\n", "n", "arm", "mean_pulls", "pull_bound",
                "mean_regret", "regret_bound");
    for (const auto& cp : report.checkpoints) {
        for (std::size_t a = 0; a < cp.mean_pulls.size(); ++a)
            std::printf("%10lld %4zu %12.3f %12.3f %14.3f %14.3f\n",
                        static_cast<long long>(cp.n), a, cp.mean_pulls[a], cp.pull_bound[a],
                        cp.mean_regret, cp.regret_bound_value);
    }
    if (!out_path.empty()) {
        hstbeam::CsvWriter csv(out_path, {"checkpoint_n", "arm_id", "mean_pulls", "pull_bound",
                                          "mean_regret", "regret_bound"});
        for (const auto& cp : report.checkpoints)
            for (std::size_t a = 0; a < cp.mean_pulls.size(); ++a)
                csv.write_row({hstbeam::csv_num(cp.n), hstbeam::csv_num(static_cast<int>(a)),
                               hstbeam::csv_num(cp.mean_pulls[a]),
                               hstbeam::csv_num(cp.pull_bound[a]),
                               hstbeam::csv_num(cp.mean_regret),
                               hstbeam::csv_num(cp.regret_bound_value)});
        std::cout << "wrote " << out_path << "\n";
    }
    std::cout << (report.clean() ? "all checkpoints within bounds\n"
                                 : "BOUND VIOLATIONS DETECTED\n");
    return report.clean() ? kExitOk : kExitRuntimeError;
}

int cmd_calibrate(const CommonOpts& opts, int seeds) {
    hstbeam::ScenarioConfig cfg = load_config(opts);
    std::vector<double> fractions;
    double births_total = 0.0;
    for (int s = 0; s < seeds; ++s) {
        hstbeam::RngStream rng(cfg.seed + static_cast<std::uint64_t>(s));
        const hstbeam::ChannelSchedule sched = hstbeam::generate_schedule(
            cfg.scene(), cfg.dynamics, cfg.link_budget(), cfg.slots_per_traverse, rng);
        const std::vector<std::int64_t> hist = sched.live_count_histogram();
        if (hist.size() > fractions.size()) fractions.resize(hist.size(), 0.0);
        for (std::size_t i = 0; i < hist.size(); ++i)
            fractions[i] += static_cast<double>(hist[i]);
        births_total += sched.total_paths_born;
    }
    const double total_slots = static_cast<double>(cfg.slots_per_traverse) * seeds;
    std::cout << "live-path count distribution over " << seeds << " traverses:\n";
    for (std::size_t i = 1; i < fractions.size(); ++i)
        std::printf("  L=%zu  %6.2f%%\n", i, 100.0 * fractions[i] / total_slots);
    std::printf("mean paths per traverse: %.1f\n", births_total / seeds);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmWave high-speed-rail beam-search simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    std::string run_policy = "bandit";
    CLI::App* run_cmd = app.add_subcommand("run", "simulate traverses for one policy");
    add_common(run_cmd, run_opts);
    run_cmd->add_option("--policy", run_policy, "bandit|sequential|genie|all");

    CommonOpts sweep_opts;
    std::string sweep_axis = "M";
    std::string sweep_policy = "bandit";
    std::vector<std::int64_t> sweep_values;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run once per value of one axis");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", sweep_axis, "M|n_antennas|num_traverses");
    sweep_cmd->add_option("--values", sweep_values, "axis values")->required();
    sweep_cmd->add_option("--policy", sweep_policy, "bandit|sequential|genie");

    std::vector<double> vb_means{0.9, 0.5, 0.3, 0.1};
    int vb_m = 2;
    int vb_d = 1;
    double vb_c = 1.0;
    std::int64_t vb_horizon = 10000;
    int vb_seeds = 200;
    std::string vb_noise = "bernoulli";
    std::string vb_out;
    CLI::App* vb_cmd =
        app.add_subcommand("verify-bounds", "check pull-count and regret bounds empirically");
    vb_cmd->add_option("--arms", vb_means, "true arm means in [0,1]");
    vb_cmd->add_option("--m", vb_m, "arms measured per slot");
    vb_cmd->add_option("--d", vb_d, "arms played per slot");
    vb_cmd->add_option("--c", vb_c, "exploration constant");
    vb_cmd->add_option("--horizon", vb_horizon, "timeslots per seed");
    vb_cmd->add_option("--seeds", vb_seeds, "number of seeds");
    vb_cmd->add_option("--noise", vb_noise, "bernoulli|truncated-gaussian");
    vb_cmd->add_option("--out", vb_out, "write the report CSV here");

    CommonOpts cal_opts;
    int cal_seeds = 50;
    CLI::App* cal_cmd =
        app.add_subcommand("calibrate", "live-path count statistics of the channel dynamics");
    add_common(cal_cmd, cal_opts);
    cal_cmd->add_option("--seeds", cal_seeds, "number of seeded traverses");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts, run_policy);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_opts, sweep_axis, sweep_values, sweep_policy);
        if (vb_cmd->parsed())
            return cmd_verify_bounds(vb_means, vb_m, vb_d, vb_c, vb_horizon, vb_seeds, vb_noise,
                                     vb_out);
        if (cal_cmd->parsed()) return cmd_calibrate(cal_opts, cal_seeds);
    } catch (const hstbeam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}

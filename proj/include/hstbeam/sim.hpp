#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstbeam/bandit.hpp"
#include "hstbeam/baselines.hpp"
#include "hstbeam/channel.hpp"
#include "hstbeam/codebook.hpp"
#include "hstbeam/csv.hpp"
#include "hstbeam/measurement.hpp"
#include "hstbeam/regret.hpp"
#include "hstbeam/scenario.hpp"

namespace hstbeam {

enum class Policy { bandit, sequential, genie };

inline std::string policy_name(Policy p) {
    switch (p) {
        case Policy::bandit: return "bandit";
        case Policy::sequential: return "sequential";
        case Policy::genie: return "genie";
    }
    return "?";
}

inline Policy policy_from_name(const std::string& name) {
    if (name == "bandit") return Policy::bandit;
    if (name == "sequential") return Policy::sequential;
    if (name == "genie") return Policy::genie;
    throw ConfigError({"unknown policy '" + name + "' (expected bandit|sequential|genie)"});
}

namespace detail {

/// Beamspace projection of one path for one WSS window:
/// w_q^H H f_p = sum_l gain_l e^{j2 pi nu_l t} u_l(q) v_l(p).
struct CachedPath {
    cxd gain;            // sqrt(Nt*Nr) * alpha_l
    double doppler_hz;
    Eigen::VectorXcd u;  // u(q) = w_q^H a_r
    Eigen::VectorXcd v;  // v(p) = a_t^H f_p
};

}  // namespace detail

// Pilot-time budget reference: measuring m of this many candidate pairs costs
// m/kPilotBudgetArms of the pilot fraction of a TTI.
inline constexpr int kPilotBudgetArms = 16;

/// Precomputed per-run channel state: the schedule plus its beamspace
/// projections, and a fast evaluator for any (slot, beam pair).
class SimContext {
  public:
    explicit SimContext(const ScenarioConfig& cfg)
        : cfg_(cfg), scene_(cfg.scene()), budget_(cfg.link_budget()),
          tx_cb_(make_dft_codebook(CodebookSide::transmit, cfg.tx_array())),
          rx_cb_(make_dft_codebook(CodebookSide::receive, cfg.rx_array())),
          mcfg_(cfg.measurement()) {
        mcfg_.validate();
    }

    void load_schedule(const ChannelSchedule& sched) {
        schedule_ = sched;
        cache_.clear();
        cache_.reserve(schedule_.windows.size());
        for (const auto& paths : schedule_.windows) {
            std::vector<detail::CachedPath> wc;
            wc.reserve(paths.size());
            const double scale = std::sqrt(static_cast<double>(cfg_.n_t) * cfg_.n_r);
            for (const PathState& p : paths) {
                detail::CachedPath c;
                c.gain = scale * p.complex_gain;
                c.doppler_hz = p.doppler_hz;
                const Eigen::VectorXcd ar = steering_vector(cfg_.rx_array(), p.aoa_rad);
                const Eigen::VectorXcd at = steering_vector(cfg_.tx_array(), p.aod_rad);
                c.u = rx_cb_.matrix * ar;
                c.v = (tx_cb_.matrix * at).conjugate();
                wc.push_back(std::move(c));
            }
            cache_.push_back(std::move(wc));
        }
    }

    void generate_and_load_schedule(RngStream& rng) {
        load_schedule(generate_schedule(scene_, cfg_.dynamics, budget_, cfg_.slots_per_traverse,
                                        rng));
    }

    /// Fix the slot whose channel subsequent pair_gain calls evaluate.
    void begin_slot(std::int64_t slot_in_traverse) {
        const std::int64_t w = schedule_.window_of_slot(slot_in_traverse);
        const double tau = schedule_.doppler_time(slot_in_traverse, scene_.tti_s);
        const auto& wc = cache_[static_cast<std::size_t>(w)];
        slot_coefs_.clear();
        for (const auto& c : wc)
            slot_coefs_.push_back(c.gain * std::polar(1.0, 2.0 * kPi * c.doppler_hz * tau));
        slot_window_ = w;
    }

    /// w_q^H H f_p of the current slot for one beam pair.
    cxd pair_gain(int arm_id) const {
        const BeamPair pair = pair_of(arm_id, cfg_.n_t);
        const auto& wc = cache_[static_cast<std::size_t>(slot_window_)];
        cxd g{0.0, 0.0};
        for (std::size_t l = 0; l < wc.size(); ++l)
            g += slot_coefs_[l] * wc[l].u(pair.rx) * wc[l].v(pair.tx);
        return g;
    }

    /// Full matrix of w_q^H H f_p values for the current slot.
    Eigen::MatrixXcd pair_gain_matrix() const {
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(cfg_.n_r, cfg_.n_t);
        const auto& wc = cache_[static_cast<std::size_t>(slot_window_)];
        for (std::size_t l = 0; l < wc.size(); ++l)
            g.noalias() += slot_coefs_[l] * (wc[l].u * wc[l].v.transpose());
        return g;
    }

    GenieResult genie_for_current_slot(int num_streams) const {
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.n_t) * cfg_.n_r);
        return genie_rates(scale * pair_gain_matrix(), num_streams, mcfg_);
    }

    const ScenarioConfig& config() const { return cfg_; }
    const ChannelSchedule& schedule() const { return schedule_; }
    const Codebook& tx_codebook() const { return tx_cb_; }
    const Codebook& rx_codebook() const { return rx_cb_; }
    const MeasurementConfig& measurement() const { return mcfg_; }
    const SceneGeometry& scene() const { return scene_; }

  private:
    ScenarioConfig cfg_;
    SceneGeometry scene_;
    LinkBudget budget_;
    Codebook tx_cb_;
    Codebook rx_cb_;
    MeasurementConfig mcfg_;
    ChannelSchedule schedule_;
    std::vector<std::vector<detail::CachedPath>> cache_;
    std::vector<cxd> slot_coefs_;
    std::int64_t slot_window_ = 0;
};

/// Environment the policies act on: pilot measurements with noise for
/// selection, noiseless realized rates for the transmitted streams.
class HstEnvironment {
  public:
    HstEnvironment(const SimContext& ctx, int num_streams)
        : ctx_(ctx), mcfg_(ctx.measurement()), num_streams_(num_streams) {}

    ArmMeasurement measure(int arm, RngStream& rng) const {
        const cxd gain = ctx_.pair_gain(arm);
        const MeasurementRecord rec =
            measure_gain(gain, arm, pair_of(arm, ctx_.config().n_t), mcfg_, rng);
        const double signal = std::max(0.0, rec.measured_power_w - mcfg_.noise_power_w);
        const double split_rate =
            std::log2(1.0 + signal / (num_streams_ * mcfg_.noise_power_w));
        return ArmMeasurement{rec.measured_power_w, split_rate};
    }

    std::vector<double> transmit(const std::vector<int>& arms, RngStream&) const {
        std::vector<double> gain_sq;
        gain_sq.reserve(arms.size());
        for (int arm : arms) gain_sq.push_back(std::norm(ctx_.pair_gain(arm)));
        return rates_from_gain_powers(gain_sq, mcfg_);
    }

  private:
    const SimContext& ctx_;
    MeasurementConfig mcfg_;
    int num_streams_;
};

struct RunResult {
    Policy policy = Policy::bandit;
    std::uint64_t seed = 0;
    std::int64_t slots_per_traverse = 0;
    int num_traverses = 0;
    int num_streams = 0;

    std::vector<double> genie_rate;    // per global slot
    std::vector<double> policy_rate;   // per global slot
    std::vector<double> cum_regret;    // per global slot
    std::vector<int> g_d_flat;         // num_streams entries per slot

    std::vector<double> traverse_mean_se;
    std::vector<double> traverse_mean_genie_se;
    std::vector<double> traverse_mean_effective_se;
    std::vector<std::int64_t> path_histogram;  // slots per live-path count, one traverse

    std::vector<BanditTable> bandit_tables;  // per bin; only for the bandit policy

    double regret_at(std::int64_t global_slot) const {
        return cum_regret.at(static_cast<std::size_t>(global_slot - 1));
    }

    double traverse_mean(int traverse) const { return traverse_mean_se.at(traverse); }
};

namespace detail {

inline constexpr std::uint64_t kScheduleTag = 0x73636865;
inline constexpr std::uint64_t kPolicyTagBase = 0x706f6c30;

}  // namespace detail

/// Simulate one policy over num_traverses passes of the coverage segment.
/// The channel realization is drawn once from the seed and replayed across
/// traverses (the environment is what the policy learns); bandit state
/// persists across traverses.
inline RunResult run(const ScenarioConfig& cfg, Policy policy) {
    cfg.validate();
    SimContext ctx(cfg);
    RngStream root(cfg.seed);
    RngStream schedule_rng = root.fork(detail::kScheduleTag);
    RngStream policy_rng =
        root.fork(detail::kPolicyTagBase + static_cast<std::uint64_t>(policy));

    const auto spt = cfg.slots_per_traverse;
    const int d = cfg.d_streams;
    const PolicyConfig pc = cfg.policy();

    RunResult res;
    res.policy = policy;
    res.seed = cfg.seed;
    res.slots_per_traverse = spt;
    res.num_traverses = cfg.num_traverses;
    res.num_streams = d;
    res.genie_rate.reserve(static_cast<std::size_t>(spt * cfg.num_traverses));
    res.policy_rate.reserve(static_cast<std::size_t>(spt * cfg.num_traverses));
    res.g_d_flat.reserve(static_cast<std::size_t>(spt * cfg.num_traverses * d));

    const std::int64_t num_bins = (spt + cfg.bin_len_slots - 1) / cfg.bin_len_slots;
    std::vector<std::optional<BanditTable>> bins(static_cast<std::size_t>(num_bins));
    std::int64_t last_bin = -1;
    SequentialScanState scan_state(cfg.num_arms());
    HstEnvironment env(ctx, d);

    std::vector<double> genie_sum(static_cast<std::size_t>(spt), 0.0);
    std::vector<std::vector<int>> genie_arms(static_cast<std::size_t>(spt));
    bool genie_cached = false;

    for (int traverse = 0; traverse < cfg.num_traverses; ++traverse) {
        if (traverse == 0 || cfg.fresh_schedule_per_traverse) {
            ctx.generate_and_load_schedule(schedule_rng);
            genie_cached = false;
        }
        if (!genie_cached) {
            for (std::int64_t slot = 0; slot < spt; ++slot) {
                ctx.begin_slot(slot);
                const GenieResult g = ctx.genie_for_current_slot(d);
                genie_sum[static_cast<std::size_t>(slot)] = g.sum_rate;
                genie_arms[static_cast<std::size_t>(slot)] = g.arms;
            }
            genie_cached = true;
        }
        for (std::int64_t slot = 0; slot < spt; ++slot) {
            ctx.begin_slot(slot);
            double rate = 0.0;
            std::vector<int> g_d;
            switch (policy) {
                case Policy::genie: {
                    rate = genie_sum[static_cast<std::size_t>(slot)];
                    g_d = genie_arms[static_cast<std::size_t>(slot)];
                    break;
                }
                case Policy::sequential: {
                    const SequentialStepResult r =
                        sequential_step(scan_state, cfg.m_measurements, d, env, policy_rng);
                    rate = std::accumulate(r.rates.begin(), r.rates.end(), 0.0);
                    g_d = r.g_d;
                    break;
                }
                case Policy::bandit: {
                    const std::int64_t bin = BinIndex::of_slot(slot, cfg.bin_len_slots).value;
                    auto& table = bins[static_cast<std::size_t>(bin)];
                    if (!table.has_value()) {
                        if (last_bin >= 0)
                            table = warm_started_table(
                                *bins[static_cast<std::size_t>(last_bin)],
                                pc.update_measured_arms ? pc.num_measure : pc.num_streams);
                        else
                            table = BanditTable(cfg.num_arms());
                    }
                    last_bin = bin;
                    const TimeslotResult r = run_timeslot(*table, pc, env, policy_rng);
                    rate = std::accumulate(r.rates.begin(), r.rates.end(), 0.0);
                    g_d = r.g_d;
                    break;
                }
            }
            res.genie_rate.push_back(genie_sum[static_cast<std::size_t>(slot)]);
            res.policy_rate.push_back(rate);
            for (int arm : g_d) res.g_d_flat.push_back(arm);
        }
    }

    res.cum_regret = cumulative_regret(res.genie_rate, res.policy_rate);

    const double data_fraction =
        (policy == Policy::genie)
            ? 1.0
            : data_time_fraction(ctx.measurement(), cfg.m_measurements, kPilotBudgetArms);
    for (int traverse = 0; traverse < cfg.num_traverses; ++traverse) {
        const auto begin = static_cast<std::size_t>(traverse) * static_cast<std::size_t>(spt);
        double se = 0.0;
        double genie_se = 0.0;
        for (std::size_t s = begin; s < begin + static_cast<std::size_t>(spt); ++s) {
            se += res.policy_rate[s];
            genie_se += res.genie_rate[s];
        }
        res.traverse_mean_se.push_back(se / static_cast<double>(spt));
        res.traverse_mean_genie_se.push_back(genie_se / static_cast<double>(spt));
        res.traverse_mean_effective_se.push_back(data_fraction * se / static_cast<double>(spt));
    }
    res.path_histogram = ctx.schedule().live_count_histogram();

    if (policy == Policy::bandit) {
        res.bandit_tables.reserve(bins.size());
        for (auto& t : bins)
            res.bandit_tables.push_back(t.has_value() ? std::move(*t)
                                                      : BanditTable(cfg.num_arms()));
    }
    return res;
}

inline std::string join_arm_ids(const std::vector<int>& flat, std::size_t slot, int d) {
    std::string s;
    for (int k = 0; k < d; ++k) {
        if (k) s += ';';
        s += std::to_string(flat[slot * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)]);
    }
    return s;
}

/// Emit the per-slot trace of one run: one row per (traverse, slot).
inline std::string write_slots_csv(const RunResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path =
        (fs::path(out_dir) / ("slots_" + policy_name(res.policy) + ".csv")).string();
    CsvWriter csv(path, {"traverse", "slot", "policy", "genie_rate", "policy_rate",
                         "cumulative_regret", "g_d_arms"});
    const auto spt = static_cast<std::size_t>(res.slots_per_traverse);
    for (std::size_t s = 0; s < res.policy_rate.size(); ++s) {
        csv.write_row({csv_num(static_cast<std::int64_t>(s / spt)),
                       csv_num(static_cast<std::int64_t>(s % spt)), policy_name(res.policy),
                       csv_num(res.genie_rate[s]), csv_num(res.policy_rate[s]),
                       csv_num(res.cum_regret[s]), join_arm_ids(res.g_d_flat, s, res.num_streams)});
    }
    return path;
}

inline std::string write_summary_csv(const std::vector<RunResult>& results,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "summary.csv").string();
    CsvWriter csv(path, {"policy", "traverse", "mean_se", "mean_genie_se", "mean_effective_se",
                         "final_cumulative_regret"});
    for (const RunResult& res : results) {
        for (int t = 0; t < res.num_traverses; ++t)
            csv.write_row({policy_name(res.policy), csv_num(t), csv_num(res.traverse_mean_se[t]),
                           csv_num(res.traverse_mean_genie_se[t]),
                           csv_num(res.traverse_mean_effective_se[t]),
                           csv_num(res.cum_regret.back())});
    }
    return path;
}

inline std::string write_path_histogram_csv(const RunResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "path_counts.csv").string();
    CsvWriter csv(path, {"live_paths", "slots", "fraction"});
    const double total = static_cast<double>(res.slots_per_traverse);
    for (std::size_t count = 0; count < res.path_histogram.size(); ++count) {
        if (count == 0 && res.path_histogram[count] == 0) continue;
        csv.write_row({csv_num(static_cast<std::int64_t>(count)),
                       csv_num(res.path_histogram[count]),
                       csv_num(static_cast<double>(res.path_histogram[count]) / total)});
    }
    return path;
}

/// Flat (bin, arm) snapshot of the learned bandit state.
inline std::string write_bandit_state_csv(const RunResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "bandit_state.csv").string();
    CsvWriter csv(path, {"bin", "arm", "pulls", "mean_reward"});
    for (std::size_t bin = 0; bin < res.bandit_tables.size(); ++bin) {
        const BanditTable& t = res.bandit_tables[bin];
        for (int arm = 0; arm < t.num_arms; ++arm)
            csv.write_row({csv_num(static_cast<std::int64_t>(bin)), csv_num(arm),
                           csv_num(t.pull_counts[static_cast<std::size_t>(arm)]),
                           csv_num(t.mean_rewards[static_cast<std::size_t>(arm)])});
    }
    return path;
}

enum class SweepAxis { measurements, antennas, traverses };

inline SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "M" || name == "measurements") return SweepAxis::measurements;
    if (name == "n_antennas" || name == "antennas") return SweepAxis::antennas;
    if (name == "num_traverses" || name == "traverses") return SweepAxis::traverses;
    throw ConfigError({"unknown sweep axis '" + name + "' (expected M|n_antennas|num_traverses)"});
}

inline std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::measurements: return "M";
        case SweepAxis::antennas: return "n_antennas";
        case SweepAxis::traverses: return "num_traverses";
    }
    return "?";
}

inline ScenarioConfig with_sweep_value(const ScenarioConfig& base, SweepAxis axis,
                                       std::int64_t value) {
    ScenarioConfig cfg = base;
    switch (axis) {
        case SweepAxis::measurements: cfg.m_measurements = static_cast<int>(value); break;
        case SweepAxis::antennas:
            cfg.n_t = static_cast<int>(value);
            cfg.n_r = static_cast<int>(value);
            break;
        case SweepAxis::traverses: cfg.num_traverses = static_cast<int>(value); break;
    }
    return cfg;
}

/// One run per value on a shared base seed; all runs see the same channel
/// realization wherever the axis does not affect it.
inline std::vector<RunResult> sweep(const ScenarioConfig& base, SweepAxis axis,
                                    const std::vector<std::int64_t>& values, Policy policy) {
    std::vector<RunResult> out;
    out.reserve(values.size());
    for (std::int64_t v : values) out.push_back(run(with_sweep_value(base, axis, v), policy));
    return out;
}

inline std::string write_sweep_csv(SweepAxis axis, const std::vector<std::int64_t>& values,
                                   const std::vector<RunResult>& results,
                                   const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "sweep.csv").string();
    CsvWriter csv(path, {"axis", "value", "policy", "traverse", "mean_se", "mean_genie_se",
                         "final_cumulative_regret"});
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunResult& res = results[i];
        for (int t = 0; t < res.num_traverses; ++t)
            csv.write_row({sweep_axis_name(axis), csv_num(values[i]), policy_name(res.policy),
                           csv_num(t), csv_num(res.traverse_mean_se[t]),
                           csv_num(res.traverse_mean_genie_se[t]),
                           csv_num(res.cum_regret.back())});
    }
    return path;
}

}  // namespace hstbeam

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hstbeam/rng.hpp"

namespace hstbeam {

/// Per-arm statistics for one location bin. `clock` counts timeslots spent in
/// the bin, not arm pulls; several arms can be rewarded per slot.
struct BanditTable {
    int num_arms = 0;
    std::vector<std::int64_t> pull_counts;
    std::vector<double> mean_rewards;
    std::int64_t clock = 0;

    BanditTable() = default;
    explicit BanditTable(int arms)
        : num_arms(arms), pull_counts(static_cast<std::size_t>(arms), 0),
          mean_rewards(static_cast<std::size_t>(arms), 0.0) {
        if (arms < 1) throw std::invalid_argument("BanditTable: num_arms < 1");
    }

    std::int64_t total_pulls() const {
        return std::accumulate(pull_counts.begin(), pull_counts.end(), std::int64_t{0});
    }
};

struct PolicyConfig {
    double exploration_c = 1.0;
    int num_measure = 2;             // M, arms measured per timeslot
    int num_streams = 1;             // D, arms carrying data streams
    double reward_ref_rate = 1.0;    // rate mapped to reward 1.0
    bool update_measured_arms = false;  // also reward measured-but-unchosen arms

    void validate(int num_arms) const {
        if (exploration_c < 0.0) throw std::invalid_argument("PolicyConfig: exploration_c < 0");
        if (num_streams < 1 || num_streams >= num_measure || num_measure > num_arms)
            throw std::invalid_argument("PolicyConfig: need 1 <= D < M <= num_arms");
        if (!(reward_ref_rate > 0.0))
            throw std::invalid_argument("PolicyConfig: reward_ref_rate <= 0");
    }
};

/// Upper confidence bounds mu_i + c sqrt(ln t / n_i); unvisited arms get a
/// +inf sentinel so they are explored first.
inline std::vector<double> ucb_scores(const BanditTable& table, const PolicyConfig& cfg) {
    const double log_t = std::log(static_cast<double>(std::max<std::int64_t>(table.clock, 1)));
    std::vector<double> scores(static_cast<std::size_t>(table.num_arms));
    for (int i = 0; i < table.num_arms; ++i) {
        const auto n = table.pull_counts[static_cast<std::size_t>(i)];
        scores[static_cast<std::size_t>(i)] =
            (n == 0) ? std::numeric_limits<double>::infinity()
                     : table.mean_rewards[static_cast<std::size_t>(i)] +
                           cfg.exploration_c * std::sqrt(log_t / static_cast<double>(n));
    }
    return scores;
}

/// Indices of the M largest values, ties resolved toward the lower index.
inline std::vector<int> top_indices(const std::vector<double>& values, int m) {
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(m));
    return order;
}

inline std::vector<int> select_arms(const BanditTable& table, const PolicyConfig& cfg) {
    if (cfg.num_measure > table.num_arms)
        throw std::invalid_argument("select_arms: M exceeds number of arms");
    return top_indices(ucb_scores(table, cfg), cfg.num_measure);
}

/// Pick the D arms with the largest selection statistic among the measured
/// set; ties go to the lower arm id.
inline std::vector<int> select_streams(const std::vector<std::pair<int, double>>& measured,
                                       int num_streams) {
    if (num_streams > static_cast<int>(measured.size()))
        throw std::invalid_argument("select_streams: D exceeds measured set");
    std::vector<std::pair<int, double>> sorted = measured;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(num_streams));
    for (int k = 0; k < num_streams; ++k) out.push_back(sorted[static_cast<std::size_t>(k)].first);
    return out;
}

/// Record rewards for the given arms (running-mean update) and advance the
/// bin clock by one timeslot.
inline void update(BanditTable& table, const std::vector<std::pair<int, double>>& rewards) {
    for (const auto& [arm, reward] : rewards) {
        if (arm < 0 || arm >= table.num_arms)
            throw std::invalid_argument("update: arm out of range");
        if (!(reward >= 0.0 && reward <= 1.0))
            throw std::invalid_argument("update: reward outside [0,1]");
    }
    for (const auto& [arm, reward] : rewards) {
        const auto i = static_cast<std::size_t>(arm);
        const double n = static_cast<double>(table.pull_counts[i]);
        table.mean_rewards[i] = (reward + table.mean_rewards[i] * n) / (n + 1.0);
        table.pull_counts[i] += 1;
    }
    table.clock += 1;
}

struct TimeslotResult {
    std::vector<int> g_m;                           // measured arms, best UCB first
    std::vector<int> g_d;                           // transmitting arms, best first
    std::vector<double> rates;                      // per-stream rates over g_d
    std::vector<std::pair<int, double>> rewards;    // rewards as recorded
};

inline double clamp_reward(double rate, double ref_rate) {
    return std::min(1.0, std::max(0.0, rate / ref_rate));
}

struct ArmMeasurement {
    double selection_stat = 0.0;  // drives the top-D stream choice
    double rate_estimate = 0.0;   // rate-equivalent used when rewarding measured arms
};

/// One timeslot of the beam-searching policy: score arms, measure the top M,
/// transmit on the top D of the measurements, reward, update.
///
/// The environment supplies
///   ArmMeasurement measure(int arm, RngStream&);
///   std::vector<double> transmit(const std::vector<int>& arms, RngStream&);
template <typename Environment>
TimeslotResult run_timeslot(BanditTable& table, const PolicyConfig& cfg, Environment&& env,
                            RngStream& rng) {
    cfg.validate(table.num_arms);
    TimeslotResult res;
    res.g_m = select_arms(table, cfg);

    std::vector<std::pair<int, double>> stats;
    std::vector<std::pair<int, double>> measured_rates;
    stats.reserve(res.g_m.size());
    measured_rates.reserve(res.g_m.size());
    for (int arm : res.g_m) {
        const ArmMeasurement m = env.measure(arm, rng);
        stats.emplace_back(arm, m.selection_stat);
        measured_rates.emplace_back(arm, m.rate_estimate);
    }

    res.g_d = select_streams(stats, cfg.num_streams);
    res.rates = env.transmit(res.g_d, rng);

    for (std::size_t k = 0; k < res.g_d.size(); ++k)
        res.rewards.emplace_back(res.g_d[k], clamp_reward(res.rates[k], cfg.reward_ref_rate));
    if (cfg.update_measured_arms) {
        for (const auto& [arm, rate] : measured_rates) {
            if (std::find(res.g_d.begin(), res.g_d.end(), arm) == res.g_d.end())
                res.rewards.emplace_back(arm, clamp_reward(rate, cfg.reward_ref_rate));
        }
    }
    update(table, res.rewards);
    return res;
}

/// Location-bin index of a timeslot within a traverse.
struct BinIndex {
    std::int64_t value = 0;

    static BinIndex of_slot(std::int64_t slot_in_traverse, std::int64_t bin_len_slots) {
        if (bin_len_slots < 1) throw std::invalid_argument("BinIndex: bin_len_slots < 1");
        if (slot_in_traverse < 0) throw std::invalid_argument("BinIndex: negative slot");
        return BinIndex{slot_in_traverse / bin_len_slots};
    }
};

/// Seed a freshly created bin table from a neighboring bin: keep the learned
/// reward ordering but cap the evidence weight at one pull per arm, so local
/// measurements dominate quickly.
inline BanditTable warm_started_table(const BanditTable& source, int rewards_per_slot) {
    BanditTable t(source.num_arms);
    std::int64_t seen = 0;
    for (int i = 0; i < source.num_arms; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (source.pull_counts[idx] > 0) {
            t.pull_counts[idx] = 1;
            t.mean_rewards[idx] = source.mean_rewards[idx];
            ++seen;
        }
    }
    const std::int64_t per_slot = std::max(1, rewards_per_slot);
    t.clock = (seen + per_slot - 1) / per_slot;
    return t;
}

}  // namespace hstbeam

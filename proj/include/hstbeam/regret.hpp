#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstbeam/bandit.hpp"
#include "hstbeam/common.hpp"
#include "hstbeam/rng.hpp"

namespace hstbeam {

/// Per-timeslot achieved vs. reference rates and the running shortfall.
struct RegretTrace {
    std::vector<double> per_slot_policy_rate;
    std::vector<double> per_slot_genie_rate;
    std::vector<double> cumulative_regret;
};

inline std::vector<double> cumulative_regret(const std::vector<double>& genie_rate,
                                             const std::vector<double>& policy_rate) {
    if (genie_rate.size() != policy_rate.size())
        throw std::invalid_argument("cumulative_regret: length mismatch");
    std::vector<double> out(genie_rate.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < genie_rate.size(); ++t) {
        acc += genie_rate[t] - policy_rate[t];
        out[t] = acc;
    }
    return out;
}

inline RegretTrace make_regret_trace(std::vector<double> genie_rate,
                                     std::vector<double> policy_rate) {
    RegretTrace tr;
    tr.cumulative_regret = cumulative_regret(genie_rate, policy_rate);
    tr.per_slot_genie_rate = std::move(genie_rate);
    tr.per_slot_policy_rate = std::move(policy_rate);
    return tr;
}

/// Upper bound on the expected number of pulls of a suboptimal arm after n
/// timeslots: 4 c^2 ln(n) / gap^2 + 1 + pi^2/3.
inline double suboptimal_pull_bound(double c, double gap_min, double n) {
    if (!(gap_min > 0.0))
        throw std::invalid_argument("suboptimal_pull_bound: gap must be > 0 (distinct means)");
    if (!(n >= 1.0)) throw std::invalid_argument("suboptimal_pull_bound: n must be >= 1");
    return 4.0 * c * c * std::log(n) / (gap_min * gap_min) + 1.0 + kPi * kPi / 3.0;
}

enum class RewardNoise { bernoulli, truncated_gaussian };

/// How the per-slot measurement that ranks the M candidates is modeled.
/// `true_mean` mirrors the high-SNR regime where a pilot measurement reliably
/// identifies the stronger path; `noisy_draw` ranks by an independent draw
/// from each arm's reward distribution.
enum class MeasurementModel { true_mean, noisy_draw };

struct SyntheticBanditSpec {
    std::vector<double> arm_means;
    RewardNoise noise = RewardNoise::bernoulli;
    double gaussian_noise_std = 0.1;  // used by truncated_gaussian only
    MeasurementModel measurement = MeasurementModel::true_mean;
    int num_measure = 2;   // M
    int num_streams = 1;   // D
    double exploration_c = 1.0;
    std::int64_t horizon = 10000;
    int num_seeds = 200;

    void validate() const {
        if (arm_means.empty()) throw std::invalid_argument("SyntheticBanditSpec: no arms");
        for (double m : arm_means)
            if (!(m >= 0.0 && m <= 1.0))
                throw std::invalid_argument("SyntheticBanditSpec: means must lie in [0,1]");
        std::vector<double> sorted = arm_means;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("SyntheticBanditSpec: arm means must be distinct");
        PolicyConfig pc;
        pc.num_measure = num_measure;
        pc.num_streams = num_streams;
        pc.exploration_c = exploration_c;
        pc.validate(static_cast<int>(arm_means.size()));
        if (horizon < 1 || num_seeds < 1)
            throw std::invalid_argument("SyntheticBanditSpec: horizon/num_seeds < 1");
    }

    /// Arms sorted by true mean, best first.
    std::vector<int> best_arms() const {
        std::vector<int> order(arm_means.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return arm_means[static_cast<std::size_t>(a)] > arm_means[static_cast<std::size_t>(b)];
        });
        return order;
    }

    double best_sum() const {
        const std::vector<int> order = best_arms();
        double s = 0.0;
        for (int k = 0; k < num_streams; ++k)
            s += arm_means[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        return s;
    }

    /// Smallest / largest mean gap between arm i and the best-D set.
    double gap_min(int arm) const {
        const std::vector<int> order = best_arms();
        double g = std::numeric_limits<double>::infinity();
        for (int k = 0; k < num_streams; ++k)
            g = std::min(g, std::abs(arm_means[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] -
                                     arm_means[static_cast<std::size_t>(arm)]));
        return g;
    }

    double gap_max(int arm) const {
        const std::vector<int> order = best_arms();
        double g = 0.0;
        for (int k = 0; k < num_streams; ++k)
            g = std::max(g, std::abs(arm_means[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] -
                                     arm_means[static_cast<std::size_t>(arm)]));
        return g;
    }
};

/// Regret bound after n timeslots: sum over suboptimal arms of
/// gap_max * suboptimal_pull_bound(c, gap_min, n).
inline double regret_bound(const SyntheticBanditSpec& spec, double n) {
    spec.validate();
    const std::vector<int> order = spec.best_arms();
    double total = 0.0;
    for (std::size_t k = static_cast<std::size_t>(spec.num_streams); k < order.size(); ++k) {
        const int arm = order[k];
        total += spec.gap_max(arm) *
                 suboptimal_pull_bound(spec.exploration_c, spec.gap_min(arm), n);
    }
    return total;
}

/// Environment adapter that lets the beam-search policy run on a synthetic
/// stationary bandit. Rewards are independent draws in [0,1].
class SyntheticEnvironment {
  public:
    explicit SyntheticEnvironment(const SyntheticBanditSpec& spec) : spec_(spec) {}

    double draw(int arm, RngStream& rng) const {
        const double mean = spec_.arm_means[static_cast<std::size_t>(arm)];
        switch (spec_.noise) {
            case RewardNoise::bernoulli:
                return rng.bernoulli(mean) ? 1.0 : 0.0;
            case RewardNoise::truncated_gaussian:
                return rng.truncated_gaussian(mean, spec_.gaussian_noise_std, 0.0, 1.0);
        }
        return mean;
    }

    ArmMeasurement measure(int arm, RngStream& rng) const {
        const double stat = (spec_.measurement == MeasurementModel::true_mean)
                                ? spec_.arm_means[static_cast<std::size_t>(arm)]
                                : draw(arm, rng);
        return ArmMeasurement{stat, stat};
    }

    std::vector<double> transmit(const std::vector<int>& arms, RngStream& rng) const {
        std::vector<double> rates;
        rates.reserve(arms.size());
        for (int arm : arms) rates.push_back(draw(arm, rng));
        return rates;
    }

  private:
    const SyntheticBanditSpec& spec_;
};

struct BoundCheckpoint {
    std::int64_t n = 0;
    std::vector<double> mean_pulls;   // per arm
    std::vector<double> pull_bound;   // per arm; +inf for arms in the best-D set
    double mean_regret = 0.0;         // expected regret given the pull sequences
    double regret_bound_value = 0.0;
};

struct BoundReport {
    SyntheticBanditSpec spec;
    std::vector<BoundCheckpoint> checkpoints;
    int pull_violations = 0;
    int regret_violations = 0;

    bool clean() const { return pull_violations == 0 && regret_violations == 0; }
};

inline std::vector<std::int64_t> power_of_two_checkpoints(std::int64_t horizon,
                                                          std::int64_t first = 64) {
    std::vector<std::int64_t> cp;
    for (std::int64_t n = first; n <= horizon; n *= 2) cp.push_back(n);
    return cp;
}

/// Run the policy on the synthetic bandit across seeds and compare the mean
/// pull counts and mean regret against their upper bounds at power-of-two
/// checkpoints. Violations are reported, not thrown.
inline BoundReport verify_bounds(const SyntheticBanditSpec& spec, std::uint64_t base_seed = 1) {
    spec.validate();
    const int num_arms = static_cast<int>(spec.arm_means.size());
    const std::vector<std::int64_t> cps = power_of_two_checkpoints(spec.horizon);
    const std::vector<int> order = spec.best_arms();
    std::vector<bool> is_best(static_cast<std::size_t>(num_arms), false);
    for (int k = 0; k < spec.num_streams; ++k)
        is_best[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
    const double best_sum = spec.best_sum();

    PolicyConfig pc;
    pc.exploration_c = spec.exploration_c;
    pc.num_measure = spec.num_measure;
    pc.num_streams = spec.num_streams;
    pc.reward_ref_rate = 1.0;

    std::vector<std::vector<double>> pulls_acc(cps.size(),
                                               std::vector<double>(num_arms, 0.0));
    std::vector<double> regret_acc(cps.size(), 0.0);

    const SyntheticEnvironment env(spec);
    RngStream root(base_seed);
    for (int seed_i = 0; seed_i < spec.num_seeds; ++seed_i) {
        RngStream rng = root.fork(static_cast<std::uint64_t>(seed_i));
        BanditTable table(num_arms);
        double regret = 0.0;
        std::size_t next_cp = 0;
        for (std::int64_t t = 1; t <= spec.horizon && next_cp < cps.size(); ++t) {
            const TimeslotResult r = run_timeslot(table, pc, env, rng);
            double played_sum = 0.0;
            for (int arm : r.g_d) played_sum += spec.arm_means[static_cast<std::size_t>(arm)];
            regret += best_sum - played_sum;
            if (t == cps[next_cp]) {
                for (int a = 0; a < num_arms; ++a)
                    pulls_acc[next_cp][static_cast<std::size_t>(a)] +=
                        static_cast<double>(table.pull_counts[static_cast<std::size_t>(a)]);
                regret_acc[next_cp] += regret;
                ++next_cp;
            }
        }
    }

    BoundReport report;
    report.spec = spec;
    for (std::size_t c = 0; c < cps.size(); ++c) {
        BoundCheckpoint cp;
        cp.n = cps[c];
        cp.mean_regret = regret_acc[c] / spec.num_seeds;
        cp.regret_bound_value = regret_bound(spec, static_cast<double>(cps[c]));
        if (cp.mean_regret > cp.regret_bound_value) ++report.regret_violations;
        for (int a = 0; a < num_arms; ++a) {
            const double mean_pulls = pulls_acc[c][static_cast<std::size_t>(a)] / spec.num_seeds;
            double bound = std::numeric_limits<double>::infinity();
            if (!is_best[static_cast<std::size_t>(a)]) {
                bound = suboptimal_pull_bound(spec.exploration_c, spec.gap_min(a),
                                              static_cast<double>(cps[c]));
                if (mean_pulls > bound) ++report.pull_violations;
            }
            cp.mean_pulls.push_back(mean_pulls);
            cp.pull_bound.push_back(bound);
        }
        report.checkpoints.push_back(std::move(cp));
    }
    return report;
}

}  // namespace hstbeam

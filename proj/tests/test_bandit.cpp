#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hstbeam/bandit.hpp"

using namespace hstbeam;

namespace {

// Deterministic environment: measurement and realized rate both equal a fixed
// per-arm value (scaled by `scale` to exercise reward normalization).
struct FixedEnv {
    std::vector<double> values;
    double scale = 1.0;

    ArmMeasurement measure(int arm, RngStream&) const {
        const double v = scale * values[static_cast<std::size_t>(arm)];
        return ArmMeasurement{v, v};
    }
    std::vector<double> transmit(const std::vector<int>& arms, RngStream&) const {
        std::vector<double> out;
        for (int a : arms) out.push_back(scale * values[static_cast<std::size_t>(a)]);
        return out;
    }
};

TEST(UcbScores, ReferenceValue) {
    BanditTable t(2);
    t.clock = 100;
    t.pull_counts = {4, 0};
    t.mean_rewards = {0.5, 0.0};
    PolicyConfig cfg;
    cfg.exploration_c = 0.5;
    const std::vector<double> s = ucb_scores(t, cfg);
    EXPECT_NEAR(s[0], 1.03649150657233681, 1e-12);
    EXPECT_TRUE(std::isinf(s[1]));
}

TEST(UcbScores, UnvisitedArmsGetTheInfinitySentinel) {
    BanditTable t(3);
    t.clock = 50;
    t.pull_counts = {7, 0, 2};
    t.mean_rewards = {0.9, 0.4, 0.2};
    PolicyConfig cfg;
    const std::vector<double> s = ucb_scores(t, cfg);
    EXPECT_FALSE(std::isinf(s[0]));
    EXPECT_TRUE(std::isinf(s[1]));
    EXPECT_FALSE(std::isinf(s[2]));
}

TEST(UcbScores, ZeroExplorationReturnsTheMeans) {
    BanditTable t(3);
    t.clock = 1000;
    t.pull_counts = {5, 6, 7};
    t.mean_rewards = {0.3, 0.7, 0.1};
    PolicyConfig cfg;
    cfg.exploration_c = 0.0;
    const std::vector<double> s = ucb_scores(t, cfg);
    EXPECT_EQ(s[0], 0.3);
    EXPECT_EQ(s[1], 0.7);
    EXPECT_EQ(s[2], 0.1);
}

TEST(SelectArms, AllUnvisitedBreaksTiesByIndex) {
    BanditTable t(10);
    PolicyConfig cfg;
    cfg.num_measure = 4;
    cfg.num_streams = 1;
    const std::vector<int> g_m = select_arms(t, cfg);
    EXPECT_EQ(g_m, (std::vector<int>{0, 1, 2, 3}));
}

TEST(SelectArms, PicksLargestScores) {
    BanditTable t(4);
    t.clock = 10;
    t.pull_counts = {1, 1, 1, 1};
    t.mean_rewards = {0.9, 0.1, 0.5, 0.7};
    PolicyConfig cfg;
    cfg.exploration_c = 0.0;
    cfg.num_measure = 2;
    const std::vector<int> g_m = select_arms(t, cfg);
    EXPECT_EQ(g_m, (std::vector<int>{0, 3}));
}

TEST(SelectArms, EqualScoresFavorLowIndices) {
    BanditTable t(6);
    t.clock = 10;
    t.pull_counts.assign(6, 2);
    t.mean_rewards.assign(6, 0.42);
    PolicyConfig cfg;
    cfg.num_measure = 3;
    EXPECT_EQ(select_arms(t, cfg), (std::vector<int>{0, 1, 2}));
}

TEST(SelectStreams, PicksLargestMeasurement) {
    const std::vector<std::pair<int, double>> meas{{4, 2.0e-12}, {9, 5.0e-12}, {1, 1.0e-12}};
    EXPECT_EQ(select_streams(meas, 1), (std::vector<int>{9}));
    EXPECT_EQ(select_streams(meas, 2), (std::vector<int>{9, 4}));
}

TEST(SelectStreams, TiesGoToTheLowerArmId) {
    const std::vector<std::pair<int, double>> meas{{7, 1.0}, {2, 1.0}, {5, 1.0}};
    EXPECT_EQ(select_streams(meas, 2), (std::vector<int>{2, 5}));
}

TEST(Update, FirstSampleBecomesTheMean) {
    BanditTable t(2);
    update(t, {{0, 0.8}});
    EXPECT_NEAR(t.mean_rewards[0], 0.8, 1e-15);
    EXPECT_EQ(t.pull_counts[0], 1);
    EXPECT_EQ(t.clock, 1);
}

TEST(Update, RunningMean) {
    BanditTable t(2);
    t.pull_counts = {3, 0};
    t.mean_rewards = {0.5, 0.0};
    update(t, {{0, 0.9}});
    EXPECT_NEAR(t.mean_rewards[0], 0.6, 1e-15);  // (0.9 + 1.5)/4
    EXPECT_EQ(t.pull_counts[0], 4);
}

TEST(Update, MeanIsAFixedPointOfItself) {
    BanditTable t(1);
    t.pull_counts = {5};
    t.mean_rewards = {0.37};
    update(t, {{0, 0.37}});
    EXPECT_NEAR(t.mean_rewards[0], 0.37, 1e-15);
    EXPECT_EQ(t.pull_counts[0], 6);
}

TEST(Update, RejectsOutOfRangeRewards) {
    BanditTable t(2);
    EXPECT_THROW(update(t, {{0, 1.2}}), std::invalid_argument);
    EXPECT_THROW(update(t, {{0, -0.1}}), std::invalid_argument);
    EXPECT_THROW(update(t, {{5, 0.5}}), std::invalid_argument);
    EXPECT_EQ(t.clock, 0);  // rejected updates leave the table untouched
    EXPECT_EQ(t.total_pulls(), 0);
}

TEST(Update, MeanEqualsTheMeanOfAllRecordedRewards) {
    BanditTable t(2);
    RngStream rng(9);
    double sum = 0.0;
    const int n = 57;
    for (int k = 0; k < n; ++k) {
        const double x = rng.uniform01();
        sum += x;
        update(t, {{1, x}});
    }
    EXPECT_NEAR(t.mean_rewards[1], sum / n, 1e-12);
    EXPECT_EQ(t.pull_counts[1], n);
}

TEST(RunTimeslot, PullAccountingMatchesStreamsPerSlot) {
    FixedEnv env{{0.9, 0.5, 0.3, 0.1, 0.7, 0.2}};
    BanditTable t(6);
    PolicyConfig cfg;
    cfg.num_measure = 3;
    cfg.num_streams = 2;
    RngStream rng(10);
    const int slots = 40;
    for (int s = 0; s < slots; ++s) run_timeslot(t, cfg, env, rng);
    EXPECT_EQ(t.total_pulls(), static_cast<std::int64_t>(slots) * cfg.num_streams);
    EXPECT_EQ(t.clock, slots);
}

TEST(RunTimeslot, GreedyAfterFullExplorationPicksTheBestArm) {
    FixedEnv env{{0.2, 0.9, 0.4, 0.6}};
    BanditTable t(4);
    PolicyConfig cfg;
    cfg.exploration_c = 0.0;
    cfg.num_measure = 2;
    cfg.num_streams = 1;
    RngStream rng(11);
    for (int s = 0; s < 4; ++s) run_timeslot(t, cfg, env, rng);  // exploration pass
    for (int s = 0; s < 20; ++s) {
        const TimeslotResult r = run_timeslot(t, cfg, env, rng);
        EXPECT_EQ(r.g_d, (std::vector<int>{1}));
    }
}

TEST(RunTimeslot, FullSweepWhenMEqualsTheArmCount) {
    FixedEnv env{{0.1, 0.8, 0.3}};
    BanditTable t(3);
    PolicyConfig cfg;
    cfg.num_measure = 3;
    cfg.num_streams = 1;
    RngStream rng(12);
    const TimeslotResult r = run_timeslot(t, cfg, env, rng);
    EXPECT_EQ(r.g_m, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(r.g_d, (std::vector<int>{1}));
}

TEST(RunTimeslot, MeasuredArmRewardsBehindTheFlag) {
    FixedEnv env{{0.9, 0.5, 0.3, 0.1}};
    PolicyConfig cfg;
    cfg.num_measure = 3;
    cfg.num_streams = 1;
    cfg.update_measured_arms = true;
    BanditTable t(4);
    RngStream rng(13);
    run_timeslot(t, cfg, env, rng);
    // all three measured arms were rewarded
    EXPECT_EQ(t.total_pulls(), 3);
    cfg.update_measured_arms = false;
    BanditTable t2(4);
    run_timeslot(t2, cfg, env, rng);
    EXPECT_EQ(t2.total_pulls(), 1);
}

TEST(RunTimeslot, ReplayDeterminism) {
    auto run_once = [](std::uint64_t seed) {
        FixedEnv env{{0.9, 0.5, 0.3, 0.1}};
        BanditTable t(4);
        PolicyConfig cfg;
        cfg.num_measure = 2;
        cfg.num_streams = 1;
        RngStream rng(seed);
        std::vector<int> history;
        for (int s = 0; s < 200; ++s) {
            const TimeslotResult r = run_timeslot(t, cfg, env, rng);
            history.insert(history.end(), r.g_m.begin(), r.g_m.end());
            history.insert(history.end(), r.g_d.begin(), r.g_d.end());
        }
        return history;
    };
    EXPECT_EQ(run_once(77), run_once(77));
}

TEST(RunTimeslot, RewardScaleInvarianceWithMatchedExploration) {
    // scaling rewards by kappa and c by kappa leaves all selections unchanged
    const double kappa = 0.25;
    auto run_once = [&](double scale, double c) {
        FixedEnv env{{0.9, 0.5, 0.3, 0.1, 0.65, 0.45}, scale};
        BanditTable t(6);
        PolicyConfig cfg;
        cfg.num_measure = 3;
        cfg.num_streams = 2;
        cfg.exploration_c = c;
        RngStream rng(5);
        std::vector<int> history;
        for (int s = 0; s < 300; ++s) {
            const TimeslotResult r = run_timeslot(t, cfg, env, rng);
            history.insert(history.end(), r.g_m.begin(), r.g_m.end());
            history.insert(history.end(), r.g_d.begin(), r.g_d.end());
        }
        return history;
    };
    EXPECT_EQ(run_once(1.0, 1.0), run_once(kappa, kappa));
}

TEST(PolicyConfig, ValidatesTheMeasureStreamOrdering) {
    PolicyConfig cfg;
    cfg.num_measure = 2;
    cfg.num_streams = 2;
    EXPECT_THROW(cfg.validate(8), std::invalid_argument);
    cfg.num_streams = 1;
    cfg.num_measure = 9;
    EXPECT_THROW(cfg.validate(8), std::invalid_argument);
    cfg.num_measure = 4;
    EXPECT_NO_THROW(cfg.validate(8));
}

TEST(BinIndex, FloorsBySlotLength) {
    EXPECT_EQ(BinIndex::of_slot(0, 100).value, 0);
    EXPECT_EQ(BinIndex::of_slot(99, 100).value, 0);
    EXPECT_EQ(BinIndex::of_slot(100, 100).value, 1);
    EXPECT_EQ(BinIndex::of_slot(19999, 100).value, 199);
    EXPECT_THROW(BinIndex::of_slot(-1, 100), std::invalid_argument);
}

TEST(WarmStart, CapsEvidenceAndKeepsTheOrdering) {
    BanditTable src(5);
    src.pull_counts = {40, 0, 7, 3, 1};
    src.mean_rewards = {0.8, 0.0, 0.6, 0.3, 0.1};
    src.clock = 60;
    const BanditTable t = warm_started_table(src, 2);
    EXPECT_EQ(t.pull_counts, (std::vector<std::int64_t>{1, 0, 1, 1, 1}));
    EXPECT_EQ(t.mean_rewards, src.mean_rewards);
    EXPECT_EQ(t.clock, 2);  // ceil(4 seen / 2 per slot)
}

}  // namespace

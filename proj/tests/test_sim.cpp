#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hstbeam/config_io.hpp"
#include "hstbeam/hstbeam.hpp"

using namespace hstbeam;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.mrrh_spacing_m = 50.0;
    cfg.slots_per_traverse = 2000;
    cfg.n_t = 8;
    cfg.n_r = 8;
    cfg.m_measurements = 4;
    cfg.d_streams = 2;
    cfg.num_traverses = 2;
    cfg.bin_len_slots = 100;
    cfg.seed = 42;
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "hstbeam_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(ConfigIo, ParsesKeysAndComments) {
    const ScenarioConfig cfg = parse_config_text(
        "# comment\n"
        "n_t = 16\n"
        "n_r = 8\n"
        "tx_power_dbm = 30  # trailing comment\n"
        "birth_probs = 0.2, 0.1, 0.05\n"
        "update_measured_arms = false\n");
    EXPECT_EQ(cfg.n_t, 16);
    EXPECT_EQ(cfg.n_r, 8);
    EXPECT_EQ(cfg.tx_power_dbm, 30.0);
    EXPECT_EQ(cfg.dynamics.birth_probs_per_window,
              (std::vector<double>{0.2, 0.1, 0.05}));
    EXPECT_FALSE(cfg.update_measured_arms);
}

TEST(ConfigIo, UnknownKeysAreErrors) {
    try {
        parse_config_text("tx_power_dmb = 33\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("tx_power_dmb"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
}

TEST(ConfigIo, BadNumbersAreErrors) {
    EXPECT_THROW(parse_config_text("tx_power_dbm = abc\n"), ConfigError);
    EXPECT_THROW(parse_config_text("n_t = 3.5\n"), ConfigError);
    EXPECT_THROW(parse_config_text("update_measured_arms = yep\n"), ConfigError);
    EXPECT_THROW(parse_config_text("just a line\n"), ConfigError);
}

TEST(ConfigIo, FileRoundTrip) {
    const fs::path dir = fresh_dir("config");
    const fs::path path = dir / "t.cfg";
    std::ofstream(path) << "seed = 9\nexploration_c = 0.25\n";
    const ScenarioConfig cfg = load_config_file(path.string());
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.exploration_c, 0.25);
    EXPECT_THROW(load_config_file((dir / "missing.cfg").string()), ConfigError);
}

TEST(ScenarioValidation, DiagnosticsNameTheBrokenFields) {
    ScenarioConfig cfg = small_config();
    cfg.slots_per_traverse = 1234;  // breaks the traverse-length consistency
    cfg.pilot_fraction = 2.0;
    try {
        cfg.validate();
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("mrrh_spacing_m"), std::string::npos);
        EXPECT_NE(msg.find("pilot_fraction"), std::string::npos);
        EXPECT_GE(e.problems().size(), 2u);
    }
}

TEST(ScenarioDefaults, PaperConstantsAreConsistent) {
    const ScenarioConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_NEAR(cfg.train_speed_mps(), 100.0, 1e-12);
    EXPECT_NEAR(cfg.wavelength_m(), 0.0107068735, 1e-10);
    EXPECT_EQ(cfg.num_arms(), 1024);
    // reference reward rate: matched LoS at the 5 m closest approach
    const double ref = cfg.effective_reward_ref_rate();
    EXPECT_GT(ref, 30.0);
    EXPECT_LT(ref, 33.0);
}

TEST(SimContext, FastPairGainMatchesTheMatrixPath) {
    const ScenarioConfig cfg = small_config();
    SimContext ctx(cfg);
    RngStream rng(55);
    ctx.generate_and_load_schedule(rng);
    const Codebook& tx = ctx.tx_codebook();
    const Codebook& rx = ctx.rx_codebook();
    for (std::int64_t slot : {0, 57, 600, 1999}) {
        ctx.begin_slot(slot);
        const ChannelSnapshot snap =
            snapshot_at(ctx.schedule(), ctx.scene(), cfg.tx_array(), cfg.rx_array(), slot);
        for (int arm : {0, 9, 33, 63}) {
            const BeamPair pair = pair_of(arm, tx.num_beams);
            const cxd direct =
                rx.beamformer(pair.rx).dot(snap.h_matrix * tx.beamformer(pair.tx));
            EXPECT_NEAR(std::abs(ctx.pair_gain(arm) - direct), 0.0, 1e-12);
        }
        const Eigen::MatrixXcd hv = virtual_channel(snap.h_matrix, tx, rx);
        const Eigen::MatrixXcd fast = ctx.pair_gain_matrix() / std::sqrt(64.0);
        EXPECT_LT((hv - fast).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Run, GenieHasZeroRegretAndReplaysAcrossTraverses) {
    const RunResult res = run(small_config(), Policy::genie);
    for (double r : res.cum_regret) EXPECT_NEAR(r, 0.0, 1e-12);
    ASSERT_EQ(res.traverse_mean_se.size(), 2u);
    EXPECT_NEAR(res.traverse_mean_se[0], res.traverse_mean_se[1], 1e-12);
    EXPECT_GT(res.traverse_mean_se[0], 0.0);
}

TEST(Run, RowCountsMatchTheProtocol) {
    const ScenarioConfig cfg = small_config();
    const RunResult res = run(cfg, Policy::sequential);
    const std::size_t slots = static_cast<std::size_t>(cfg.slots_per_traverse) * 2;
    EXPECT_EQ(res.policy_rate.size(), slots);
    EXPECT_EQ(res.genie_rate.size(), slots);
    EXPECT_EQ(res.cum_regret.size(), slots);
    EXPECT_EQ(res.g_d_flat.size(), slots * static_cast<std::size_t>(cfg.d_streams));
}

TEST(Run, RegretIsNonNegativeAndNonDecreasing) {
    const RunResult res = run(small_config(), Policy::bandit);
    double prev = 0.0;
    for (double r : res.cum_regret) {
        EXPECT_GE(r, prev - 1e-9);
        prev = r;
    }
}

TEST(Run, BanditImprovesOnTheSecondTraverse) {
    const ScenarioConfig cfg = small_config();
    const RunResult res = run(cfg, Policy::bandit);
    const double inc1 = res.regret_at(cfg.slots_per_traverse);
    const double inc2 = res.regret_at(2 * cfg.slots_per_traverse) - inc1;
    EXPECT_LT(inc2, inc1);
}

TEST(Run, DeterministicCsvBytes) {
    const ScenarioConfig cfg = small_config();
    const fs::path dir_a = fresh_dir("det_a");
    const fs::path dir_b = fresh_dir("det_b");
    const RunResult a = run(cfg, Policy::bandit);
    const RunResult b = run(cfg, Policy::bandit);
    write_slots_csv(a, dir_a.string());
    write_slots_csv(b, dir_b.string());
    write_summary_csv({a}, dir_a.string());
    write_summary_csv({b}, dir_b.string());
    EXPECT_EQ(read_file((dir_a / "slots_bandit.csv").string()),
              read_file((dir_b / "slots_bandit.csv").string()));
    EXPECT_EQ(read_file((dir_a / "summary.csv").string()),
              read_file((dir_b / "summary.csv").string()));
    EXPECT_FALSE(read_file((dir_a / "slots_bandit.csv").string()).empty());
}

TEST(Run, SlotsCsvHasTheContractColumns) {
    const fs::path dir = fresh_dir("csv_cols");
    const RunResult res = run(small_config(), Policy::genie);
    const std::string path = write_slots_csv(res, dir.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "traverse,slot,policy,genie_rate,policy_rate,cumulative_regret,g_d_arms");
    std::string first;
    std::getline(in, first);
    EXPECT_NE(first.find("genie"), std::string::npos);
    std::size_t rows = 1;
    std::string line;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2u * 2000u);
}

TEST(Run, BanditStateExportCoversEveryBinAndArm) {
    const ScenarioConfig cfg = small_config();
    const fs::path dir = fresh_dir("bandit_state");
    const RunResult res = run(cfg, Policy::bandit);
    const std::string path = write_bandit_state_csv(res, dir.string());
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    const std::size_t bins = 2000 / 100;
    EXPECT_EQ(rows, 1 + bins * 64);
}

TEST(Run, PathHistogramAccountsForEverySlot) {
    const ScenarioConfig cfg = small_config();
    const RunResult res = run(cfg, Policy::genie);
    std::int64_t total = 0;
    for (std::int64_t c : res.path_histogram) total += c;
    EXPECT_EQ(total, cfg.slots_per_traverse);
    EXPECT_EQ(res.path_histogram[0], 0);  // never zero live paths
}

TEST(Sweep, SingleValueMatchesAPlainRun) {
    const ScenarioConfig cfg = small_config();
    const std::vector<RunResult> swept = sweep(cfg, SweepAxis::measurements, {4}, Policy::bandit);
    const RunResult direct = run(cfg, Policy::bandit);
    ASSERT_EQ(swept.size(), 1u);
    EXPECT_EQ(swept[0].traverse_mean_se, direct.traverse_mean_se);
    EXPECT_EQ(swept[0].cum_regret.back(), direct.cum_regret.back());
}

TEST(Sweep, WritesOneRowPerValueAndTraverse) {
    const ScenarioConfig cfg = small_config();
    const fs::path dir = fresh_dir("sweep");
    const std::vector<std::int64_t> values{4, 6};
    const std::vector<RunResult> results = sweep(cfg, SweepAxis::measurements, values,
                                                 Policy::sequential);
    const std::string path = write_sweep_csv(SweepAxis::measurements, values, results,
                                             dir.string());
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 1 + values.size() * 2);
}

TEST(Sweep, AxisParsing) {
    EXPECT_EQ(sweep_axis_from_name("M"), SweepAxis::measurements);
    EXPECT_EQ(sweep_axis_from_name("n_antennas"), SweepAxis::antennas);
    EXPECT_EQ(sweep_axis_from_name("num_traverses"), SweepAxis::traverses);
    EXPECT_THROW(sweep_axis_from_name("bogus"), ConfigError);
}

TEST(Policy, NamesRoundTrip) {
    for (Policy p : {Policy::bandit, Policy::sequential, Policy::genie})
        EXPECT_EQ(policy_from_name(policy_name(p)), p);
    EXPECT_THROW(policy_from_name("oracle"), ConfigError);
}

}  // namespace

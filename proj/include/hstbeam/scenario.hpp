#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstbeam/bandit.hpp"
#include "hstbeam/channel.hpp"
#include "hstbeam/codebook.hpp"
#include "hstbeam/common.hpp"
#include "hstbeam/geometry.hpp"
#include "hstbeam/measurement.hpp"

namespace hstbeam {

/// Configuration rejected; message lists one diagnostic per offending field.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::vector<std::string>& problems)
        : std::runtime_error(join(problems)), problems_(problems) {}

    const std::vector<std::string>& problems() const { return problems_; }

  private:
    static std::string join(const std::vector<std::string>& problems) {
        std::string msg = "invalid configuration:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        return msg;
    }
    std::vector<std::string> problems_;
};

/// Full experiment description: trackside geometry, radio constants, beam
/// codebook sizes, policy parameters and channel dynamics.
struct ScenarioConfig {
    // geometry / radio
    double mrrh_spacing_m = 500.0;
    double track_offset_m = 5.0;
    double building_offset_m = 30.0;
    double carrier_hz = 28e9;
    double tx_antenna_gain_dbi = 25.0;
    double rx_antenna_gain_dbi = 12.0;
    double tx_power_dbm = 33.0;
    double noise_power_dbm = -80.0;
    double train_speed_kmh = 360.0;
    double tti_s = 0.25e-3;
    std::int64_t slots_per_traverse = 20000;
    int num_traverses = 2;
    int n_t = 32;
    int n_r = 32;

    // policy
    int m_measurements = 6;
    int d_streams = 3;
    double exploration_c = 0.1;
    std::int64_t bin_len_slots = 100;
    bool update_measured_arms = true;
    double reward_ref_rate = 0.0;  // 0 -> derive from the link budget

    // pilot measurements
    int pilot_length = 16;
    double pilot_fraction = 0.2;

    // channel dynamics
    PathDynamicsConfig dynamics;

    // run control
    std::uint64_t seed = 1;
    bool fresh_schedule_per_traverse = false;

    double train_speed_mps() const { return train_speed_kmh / 3.6; }
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    int num_arms() const { return n_t * n_r; }

    SceneGeometry scene() const {
        SceneGeometry s;
        s.coverage_length_m = mrrh_spacing_m;
        s.track_offset_m = track_offset_m;
        s.building_offset_m = building_offset_m;
        s.train_speed_mps = train_speed_mps();
        s.tti_s = tti_s;
        s.carrier_wavelength_m = wavelength_m();
        return s;
    }

    LinkBudget link_budget() const {
        return LinkBudget{tx_antenna_gain_dbi + rx_antenna_gain_dbi};
    }

    ArrayGeometry tx_array() const { return ArrayGeometry::half_wavelength(n_t, wavelength_m()); }
    ArrayGeometry rx_array() const { return ArrayGeometry::half_wavelength(n_r, wavelength_m()); }

    MeasurementConfig measurement() const {
        MeasurementConfig m;
        m.tx_power_w = dbm_to_watt(tx_power_dbm);
        m.noise_power_w = dbm_to_watt(noise_power_dbm);
        m.pilot_length = pilot_length;
        m.tti_s = tti_s;
        m.pilot_fraction = pilot_fraction;
        return m;
    }

    /// Rate that maps to reward 1.0: the matched-beam LoS rate at the closest
    /// approach, the upper edge of the link budget.
    double effective_reward_ref_rate() const {
        if (reward_ref_rate > 0.0) return reward_ref_rate;
        const double gain_max =
            db_to_linear(tx_antenna_gain_dbi + rx_antenna_gain_dbi - pathloss_db(track_offset_m));
        const double snr_max = dbm_to_watt(tx_power_dbm) * num_arms() * gain_max /
                               dbm_to_watt(noise_power_dbm);
        return std::log2(1.0 + snr_max);
    }

    PolicyConfig policy() const {
        PolicyConfig p;
        p.exploration_c = exploration_c;
        p.num_measure = m_measurements;
        p.num_streams = d_streams;
        p.reward_ref_rate = effective_reward_ref_rate();
        p.update_measured_arms = update_measured_arms;
        return p;
    }

    void validate() const {
        std::vector<std::string> problems;
        auto require = [&](bool ok, const std::string& msg) {
            if (!ok) problems.push_back(msg);
        };
        require(mrrh_spacing_m > 0, "mrrh_spacing_m must be > 0");
        require(track_offset_m > 0, "track_offset_m must be > 0");
        require(building_offset_m > 0, "building_offset_m must be > 0");
        require(carrier_hz > 0, "carrier_hz must be > 0");
        require(train_speed_kmh >= 0, "train_speed_kmh must be >= 0");
        require(tti_s > 0, "tti_s must be > 0");
        require(slots_per_traverse >= 1, "slots_per_traverse must be >= 1");
        require(num_traverses >= 1, "num_traverses must be >= 1");
        require(n_t >= 1 && n_r >= 1, "n_t and n_r must be >= 1");
        require(pilot_length >= 1, "pilot_length must be >= 1");
        require(pilot_fraction > 0 && pilot_fraction < 1, "pilot_fraction must lie in (0,1)");
        require(bin_len_slots >= 1, "bin_len_slots must be >= 1");
        require(exploration_c >= 0, "exploration_c must be >= 0");
        require(reward_ref_rate >= 0, "reward_ref_rate must be >= 0 (0 = automatic)");
        if (n_t >= 1 && n_r >= 1) {
            if (!(m_measurements >= 1 && d_streams >= 1 && d_streams < m_measurements &&
                  m_measurements <= num_arms()))
                problems.push_back("m_measurements/d_streams must satisfy 1 <= D < M <= n_t*n_r");
        }
        if (train_speed_kmh > 0 && tti_s > 0) {
            const double travelled = slots_per_traverse * tti_s * train_speed_mps();
            if (std::abs(travelled - mrrh_spacing_m) > 1e-6 * mrrh_spacing_m)
                problems.push_back(
                    "slots_per_traverse * tti_s * train speed must equal mrrh_spacing_m (got " +
                    std::to_string(travelled) + " m)");
        }
        try {
            dynamics.validate(tti_s);
        } catch (const std::exception& e) {
            problems.push_back(e.what());
        }
        if (!problems.empty()) throw ConfigError(problems);
    }
};

}  // namespace hstbeam

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "hstbeam/codebook.hpp"
#include "hstbeam/common.hpp"
#include "hstbeam/rng.hpp"

namespace hstbeam {

struct MeasurementConfig {
    double tx_power_w = dbm_to_watt(33.0);
    double noise_power_w = dbm_to_watt(-80.0);
    int pilot_length = 16;
    double tti_s = 0.25e-3;
    double pilot_fraction = 0.2;

    void validate() const {
        if (!(tx_power_w > 0.0)) throw std::invalid_argument("MeasurementConfig: tx_power_w <= 0");
        if (!(noise_power_w > 0.0))
            throw std::invalid_argument("MeasurementConfig: noise_power_w <= 0");
        if (pilot_length < 1) throw std::invalid_argument("MeasurementConfig: pilot_length < 1");
        if (!(tti_s > 0.0)) throw std::invalid_argument("MeasurementConfig: tti_s <= 0");
        if (!(pilot_fraction > 0.0) || !(pilot_fraction < 1.0))
            throw std::invalid_argument("MeasurementConfig: pilot_fraction outside (0,1)");
    }
};

struct MeasurementRecord {
    int arm_id = 0;
    BeamPair beam_pair;
    double measured_power_w = 0.0;  // mean received pilot power, noise included
    double est_rate_bps_hz = 0.0;   // SNR estimate after subtracting the noise floor
};

/// Pilot measurement of one beam-pair gain g = w^H H f. The pilot is realized
/// through its power statistics only (unit-modulus symbols); each pilot sample
/// sees an independent complex Gaussian noise term of variance noise_power_w.
inline MeasurementRecord measure_gain(cxd gain, int arm_id, const BeamPair& pair,
                                      const MeasurementConfig& cfg, RngStream& rng) {
    const double amp = std::sqrt(cfg.tx_power_w);
    const double noise_sigma = std::sqrt(cfg.noise_power_w / 2.0);
    double acc = 0.0;
    for (int s = 0; s < cfg.pilot_length; ++s) {
        const cxd noise{rng.gaussian(0.0, noise_sigma), rng.gaussian(0.0, noise_sigma)};
        acc += std::norm(amp * gain + noise);
    }
    MeasurementRecord rec;
    rec.arm_id = arm_id;
    rec.beam_pair = pair;
    rec.measured_power_w = acc / cfg.pilot_length;
    const double signal = std::max(0.0, rec.measured_power_w - cfg.noise_power_w);
    rec.est_rate_bps_hz = std::log2(1.0 + signal / cfg.noise_power_w);
    return rec;
}

inline MeasurementRecord measure_arm(const Eigen::MatrixXcd& h, int arm_id, const Codebook& tx_cb,
                                     const Codebook& rx_cb, const MeasurementConfig& cfg,
                                     RngStream& rng) {
    if (arm_id < 0 || arm_id >= tx_cb.num_beams * rx_cb.num_beams)
        throw std::invalid_argument("measure_arm: arm_id out of range");
    const BeamPair pair = pair_of(arm_id, tx_cb.num_beams);
    const cxd gain =
        rx_cb.beamformer(pair.rx).dot(h * tx_cb.beamformer(pair.tx));  // w^H H f
    return measure_gain(gain, arm_id, pair, cfg, rng);
}

/// Per-stream Shannon rates for D parallel streams with an equal power split
/// and interference between the (orthogonal-beam) streams neglected.
inline std::vector<double> rates_from_gain_powers(const std::vector<double>& gain_sq,
                                                  const MeasurementConfig& cfg) {
    const double d = static_cast<double>(gain_sq.size());
    std::vector<double> rates;
    rates.reserve(gain_sq.size());
    for (double g2 : gain_sq)
        rates.push_back(std::log2(1.0 + cfg.tx_power_w / d * g2 / cfg.noise_power_w));
    return rates;
}

inline std::vector<double> transmit_rates(const Eigen::MatrixXcd& h,
                                          const std::vector<int>& chosen_arms,
                                          const Codebook& tx_cb, const Codebook& rx_cb,
                                          const MeasurementConfig& cfg) {
    std::set<int> unique(chosen_arms.begin(), chosen_arms.end());
    if (unique.size() != chosen_arms.size())
        throw std::invalid_argument("transmit_rates: duplicate arms");
    std::vector<double> gain_sq;
    gain_sq.reserve(chosen_arms.size());
    for (int arm : chosen_arms) {
        if (arm < 0 || arm >= tx_cb.num_beams * rx_cb.num_beams)
            throw std::invalid_argument("transmit_rates: arm_id out of range");
        const BeamPair pair = pair_of(arm, tx_cb.num_beams);
        const cxd gain = rx_cb.beamformer(pair.rx).dot(h * tx_cb.beamformer(pair.tx));
        gain_sq.push_back(std::norm(gain));
    }
    return rates_from_gain_powers(gain_sq, cfg);
}

/// Fraction of a TTI left for data when m of m_budget pilot measurements are
/// spent, with pilot_fraction of the TTI covering a full measurement budget.
inline double data_time_fraction(const MeasurementConfig& cfg, int m, int m_budget) {
    if (m_budget < 1) throw std::invalid_argument("data_time_fraction: m_budget < 1");
    return 1.0 - cfg.pilot_fraction * std::min(m, m_budget) / static_cast<double>(m_budget);
}

}  // namespace hstbeam

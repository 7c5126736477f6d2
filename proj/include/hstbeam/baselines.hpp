#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hstbeam/bandit.hpp"
#include "hstbeam/codebook.hpp"
#include "hstbeam/measurement.hpp"

namespace hstbeam {

/// Round-robin scan over the beam-pair plane, keeping the pairs that carried
/// data in the previous TTI in the measurement set.
struct SequentialScanState {
    int num_arms = 0;
    int cursor = 0;
    std::vector<int> held_arms;

    explicit SequentialScanState(int arms) : num_arms(arms) {
        if (arms < 1) throw std::invalid_argument("SequentialScanState: num_arms < 1");
    }
};

struct SequentialStepResult {
    std::vector<int> g_m;
    std::vector<int> g_d;
    std::vector<double> rates;
};

template <typename Environment>
SequentialStepResult sequential_step(SequentialScanState& state, int num_measure, int num_streams,
                                     Environment&& env, RngStream& rng) {
    if (num_streams >= num_measure)
        throw std::invalid_argument("sequential_step: need D < M");
    if (num_measure > state.num_arms)
        throw std::invalid_argument("sequential_step: M exceeds number of arms");

    SequentialStepResult res;
    res.g_m = state.held_arms;
    const auto already_picked = [&](int arm) {
        return std::find(res.g_m.begin(), res.g_m.end(), arm) != res.g_m.end();
    };
    while (static_cast<int>(res.g_m.size()) < num_measure) {
        const int candidate = state.cursor;
        state.cursor = (state.cursor + 1) % state.num_arms;
        if (!already_picked(candidate)) res.g_m.push_back(candidate);
    }

    std::vector<std::pair<int, double>> stats;
    stats.reserve(res.g_m.size());
    for (int arm : res.g_m) stats.emplace_back(arm, env.measure(arm, rng).selection_stat);
    res.g_d = select_streams(stats, num_streams);
    res.rates = env.transmit(res.g_d, rng);
    state.held_arms = res.g_d;
    return res;
}

struct GenieResult {
    std::vector<int> arms;     // the D strongest beam pairs, strongest first
    std::vector<double> rates; // per-stream rates; zero on streams left idle
    int engaged_streams = 0;   // the power split that maximizes the sum rate
    double sum_rate = 0.0;
};

/// Perfect-CSI selection from the noiseless beamspace matrix: take the D
/// strongest entries, then pick the stream count D' <= D whose equal power
/// split maximizes the sum rate (spreading power over near-dead paths only
/// loses rate, so the limit plateaus rather than dips).
inline GenieResult genie_rates(const Eigen::MatrixXcd& hv, int num_streams,
                               const MeasurementConfig& cfg) {
    if (num_streams < 1) throw std::invalid_argument("genie_rates: num_streams < 1");
    const int nt = static_cast<int>(hv.cols());
    const int nr = static_cast<int>(hv.rows());
    const int num_arms = nt * nr;
    const int d = std::min(num_streams, num_arms);

    std::vector<std::pair<int, double>> by_power;  // (arm, |w^H H f|^2)
    by_power.reserve(static_cast<std::size_t>(num_arms));
    const double beam_gain = static_cast<double>(nt) * nr;
    for (int q = 0; q < nr; ++q)
        for (int p = 0; p < nt; ++p)
            by_power.emplace_back(arm_of(BeamPair{p, q}, nt), beam_gain * std::norm(hv(q, p)));
    std::stable_sort(by_power.begin(), by_power.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    GenieResult res;
    res.arms.reserve(static_cast<std::size_t>(d));
    std::vector<double> top_gain_sq;
    for (int k = 0; k < d; ++k) {
        res.arms.push_back(by_power[static_cast<std::size_t>(k)].first);
        top_gain_sq.push_back(by_power[static_cast<std::size_t>(k)].second);
    }

    int best_engaged = 1;
    double best_sum = -1.0;
    std::vector<double> best_rates;
    for (int engaged = 1; engaged <= d; ++engaged) {
        const std::vector<double> rates = rates_from_gain_powers(
            std::vector<double>(top_gain_sq.begin(), top_gain_sq.begin() + engaged), cfg);
        const double sum = std::accumulate(rates.begin(), rates.end(), 0.0);
        if (sum > best_sum) {
            best_sum = sum;
            best_engaged = engaged;
            best_rates = rates;
        }
    }
    best_rates.resize(static_cast<std::size_t>(d), 0.0);
    res.rates = std::move(best_rates);
    res.engaged_streams = best_engaged;
    res.sum_rate = best_sum;
    return res;
}

inline GenieResult genie_rates(const Eigen::MatrixXcd& h, const Codebook& tx_cb,
                               const Codebook& rx_cb, int num_streams,
                               const MeasurementConfig& cfg) {
    return genie_rates(virtual_channel(h, tx_cb, rx_cb), num_streams, cfg);
}

}  // namespace hstbeam

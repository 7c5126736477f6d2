#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hstbeam/common.hpp"
#include "hstbeam/geometry.hpp"
#include "hstbeam/rng.hpp"

namespace hstbeam {

inline constexpr std::int64_t kNeverDies = std::numeric_limits<std::int64_t>::max();

/// One propagation path. Per-window fields (gain, angles, Doppler) are
/// piecewise constant: they are refreshed from geometry at every WSS window
/// boundary, and only the Doppler phase evolves inside a window.
struct PathState {
    int path_id = 0;
    bool is_los = false;
    cxd complex_gain{0.0, 0.0};
    double aod_rad = 0.0;
    double aoa_rad = 0.0;
    double doppler_hz = 0.0;
    std::int64_t birth_window = 0;
    std::int64_t death_window = kNeverDies;

    // Reflection bookkeeping for NLoS paths; fixed for the path's lifetime.
    double reflector_x_m = 0.0;
    double extra_loss_db = 0.0;
};

/// Birth-death dynamics of the reflected paths.
///
/// birth_probs_per_window[k] is the probability that a new path appears in a
/// WSS window when k reflected paths are currently alive (the last entry
/// applies to all larger k). Births are suppressed entirely once the total
/// live-path count reaches max_paths.
struct PathDynamicsConfig {
    double wss_window_s = 0.025;
    std::vector<double> birth_probs_per_window{0.23, 0.22, 0.085, 0.025};
    int max_paths = 5;
    double lifetime_mean_s = 0.26;
    double lifetime_std_s = 0.13;
    double lifetime_min_s = 0.025;
    double lifetime_max_s = 0.78;
    double nlos_extra_loss_db = 15.0;
    // Additional loss per already-alive reflected path at birth; makes
    // higher-order reflections progressively weaker.
    double nlos_order_loss_db = 7.0;

    void set_uniform_birth_prob(double p) { birth_probs_per_window.assign(1, p); }

    double birth_prob_for(std::size_t nlos_count) const {
        if (birth_probs_per_window.empty()) return 0.0;
        const std::size_t i = std::min(nlos_count, birth_probs_per_window.size() - 1);
        return birth_probs_per_window[i];
    }

    void validate(double tti_s) const {
        if (!(lifetime_min_s > 0.0) || lifetime_min_s > lifetime_max_s)
            throw std::invalid_argument("PathDynamicsConfig: need 0 < lifetime_min <= lifetime_max");
        if (lifetime_mean_s < lifetime_min_s || lifetime_mean_s > lifetime_max_s)
            throw std::invalid_argument("PathDynamicsConfig: lifetime_mean outside truncation bounds");
        if (max_paths < 1) throw std::invalid_argument("PathDynamicsConfig: max_paths < 1");
        for (double p : birth_probs_per_window)
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("PathDynamicsConfig: birth prob outside [0,1]");
        const double ratio = wss_window_s / tti_s;
        if (std::abs(ratio - std::round(ratio)) > 1e-9)
            throw std::invalid_argument(
                "PathDynamicsConfig: wss_window_s must be an integer multiple of the TTI");
    }
};

inline PathState make_los_path() {
    PathState p;
    p.path_id = 0;
    p.is_los = true;
    p.birth_window = 0;
    p.death_window = kNeverDies;
    return p;
}

/// Advance the path set by one WSS window: expire reflected paths whose
/// death window has been reached, then draw at most one birth. The new path's
/// reflector is placed uniformly along the building line; its lifetime is a
/// truncated Gaussian converted to whole windows.
inline std::vector<PathState> evolve_paths(const PathDynamicsConfig& dyn,
                                           const SceneGeometry& scene,
                                           const std::vector<PathState>& prev_paths,
                                           std::int64_t window_index, RngStream& rng,
                                           int* next_path_id = nullptr) {
    if (window_index < 0) throw std::invalid_argument("evolve_paths: negative window index");
    std::vector<PathState> out;
    out.reserve(prev_paths.size() + 1);
    std::size_t nlos = 0;
    int max_id = 0;
    bool has_los = false;
    for (const PathState& p : prev_paths) {
        max_id = std::max(max_id, p.path_id);
        if (p.is_los) {
            has_los = true;
            out.push_back(p);
        } else if (p.death_window > window_index) {
            out.push_back(p);
            ++nlos;
        }
    }
    if (!has_los) throw std::invalid_argument("evolve_paths: LoS path missing from prev_paths");

    if (out.size() < static_cast<std::size_t>(dyn.max_paths) &&
        rng.bernoulli(dyn.birth_prob_for(nlos))) {
        PathState p;
        p.path_id = (next_path_id != nullptr) ? (*next_path_id)++ : max_id + 1;
        p.is_los = false;
        p.birth_window = window_index;
        const double lifetime = rng.truncated_gaussian(dyn.lifetime_mean_s, dyn.lifetime_std_s,
                                                       dyn.lifetime_min_s, dyn.lifetime_max_s);
        p.death_window =
            window_index + static_cast<std::int64_t>(std::ceil(lifetime / dyn.wss_window_s));
        p.reflector_x_m = rng.uniform(0.0, scene.coverage_length_m);
        p.extra_loss_db =
            dyn.nlos_extra_loss_db + dyn.nlos_order_loss_db * static_cast<double>(nlos);
        out.push_back(p);
    }
    return out;
}

/// Physical channel matrix, sqrt(Nt*Nr) * sum_l alpha_l a_r(aoa) a_t(aod)^H e^{j 2 pi nu t}.
inline Eigen::MatrixXcd build_channel(const std::vector<PathState>& paths,
                                      const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                                      double time_s) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rx_geom.num_elements, tx_geom.num_elements);
    const double scale =
        std::sqrt(static_cast<double>(tx_geom.num_elements) * rx_geom.num_elements);
    for (const PathState& p : paths) {
        const Eigen::VectorXcd ar = steering_vector(rx_geom, p.aoa_rad);
        const Eigen::VectorXcd at = steering_vector(tx_geom, p.aod_rad);
        const cxd rot = std::polar(1.0, 2.0 * kPi * p.doppler_hz * time_s);
        h.noalias() += (scale * p.complex_gain * rot) * (ar * at.adjoint());
    }
    return h;
}

/// Set of live paths at one timeslot together with the realized channel.
struct ChannelSnapshot {
    std::int64_t timeslot = 0;
    double doppler_time_s = 0.0;  // time since the WSS window began
    std::vector<PathState> live_paths;
    Eigen::MatrixXcd h_matrix;
};

/// Link-budget inputs needed to turn a path's geometry into a complex gain.
struct LinkBudget {
    double antenna_gain_db = 37.0;  // combined head + terminal antenna gains

    double amplitude_for(double distance_m, double extra_loss_db) const {
        const double loss_db = pathloss_db(distance_m) + extra_loss_db - antenna_gain_db;
        return std::pow(10.0, -loss_db / 20.0);
    }
};

/// Recompute a path's per-window parameters from geometry at a window start.
/// The LoS phase follows the carrier phase of the direct distance; reflected
/// paths draw a fresh scattering phase each window.
inline void refresh_path_for_window(const SceneGeometry& scene, const LinkBudget& budget,
                                    std::int64_t slots_per_traverse, std::int64_t window_start_slot,
                                    PathState& path, RngStream& rng) {
    if (path.is_los) {
        const LosGeometry g = los_geometry(scene, window_start_slot, slots_per_traverse);
        path.aod_rad = g.aod_rad;
        path.aoa_rad = g.aoa_rad;
        path.doppler_hz = g.doppler_hz;
        const double amp = budget.amplitude_for(g.distance_m, 0.0);
        const double phase = -2.0 * kPi * g.distance_m / scene.carrier_wavelength_m;
        path.complex_gain = std::polar(amp, std::remainder(phase, 2.0 * kPi));
    } else {
        const double x = scene.train_x(scene.slot_time(window_start_slot));
        const LosGeometry g = reflected_geometry(scene, path.reflector_x_m, x);
        path.aod_rad = g.aod_rad;
        path.aoa_rad = g.aoa_rad;
        path.doppler_hz = g.doppler_hz;
        const double amp = budget.amplitude_for(g.distance_m, path.extra_loss_db);
        path.complex_gain = std::polar(amp, rng.uniform(0.0, 2.0 * kPi));
    }
}

/// The full per-run channel realization: one path set per WSS window, with
/// per-window parameters frozen at the window start. Deterministic in the
/// generating stream, so a run can replay the same environment traverse after
/// traverse.
struct ChannelSchedule {
    std::int64_t slots_per_traverse = 0;
    std::int64_t slots_per_window = 0;
    std::vector<std::vector<PathState>> windows;
    int total_paths_born = 0;

    std::int64_t num_windows() const { return static_cast<std::int64_t>(windows.size()); }

    std::int64_t window_of_slot(std::int64_t slot) const {
        if (slot < 0 || slot >= slots_per_traverse)
            throw std::invalid_argument("ChannelSchedule: slot outside traverse");
        return std::min(slot / slots_per_window, num_windows() - 1);
    }

    const std::vector<PathState>& paths_at_slot(std::int64_t slot) const {
        return windows[static_cast<std::size_t>(window_of_slot(slot))];
    }

    double doppler_time(std::int64_t slot, double tti_s) const {
        return static_cast<double>(slot - window_of_slot(slot) * slots_per_window) * tti_s;
    }

    /// Histogram of the live-path count over slots; index = count.
    std::vector<std::int64_t> live_count_histogram() const {
        std::vector<std::int64_t> hist;
        for (std::int64_t w = 0; w < num_windows(); ++w) {
            const std::size_t count = windows[static_cast<std::size_t>(w)].size();
            if (count >= hist.size()) hist.resize(count + 1, 0);
            const std::int64_t slots =
                std::min(slots_per_window, slots_per_traverse - w * slots_per_window);
            hist[count] += slots;
        }
        return hist;
    }
};

inline ChannelSchedule generate_schedule(const SceneGeometry& scene,
                                         const PathDynamicsConfig& dyn, const LinkBudget& budget,
                                         std::int64_t slots_per_traverse, RngStream& rng) {
    dyn.validate(scene.tti_s);
    const auto spw = static_cast<std::int64_t>(std::llround(dyn.wss_window_s / scene.tti_s));
    if (spw < 1) throw std::invalid_argument("generate_schedule: WSS window shorter than one TTI");
    ChannelSchedule sched;
    sched.slots_per_traverse = slots_per_traverse;
    sched.slots_per_window = spw;
    const std::int64_t num_windows = (slots_per_traverse + spw - 1) / spw;
    sched.windows.reserve(static_cast<std::size_t>(num_windows));

    std::vector<PathState> paths{make_los_path()};
    int next_id = 1;
    for (std::int64_t w = 0; w < num_windows; ++w) {
        paths = evolve_paths(dyn, scene, paths, w, rng, &next_id);
        for (PathState& p : paths)
            refresh_path_for_window(scene, budget, slots_per_traverse, w * spw, p, rng);
        sched.windows.push_back(paths);
    }
    sched.total_paths_born = next_id;
    return sched;
}

inline ChannelSnapshot snapshot_at(const ChannelSchedule& sched, const SceneGeometry& scene,
                                   const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                                   std::int64_t slot) {
    ChannelSnapshot snap;
    snap.timeslot = slot;
    snap.doppler_time_s = sched.doppler_time(slot, scene.tti_s);
    snap.live_paths = sched.paths_at_slot(slot);
    snap.h_matrix = build_channel(snap.live_paths, tx_geom, rx_geom, snap.doppler_time_s);
    return snap;
}

}  // namespace hstbeam

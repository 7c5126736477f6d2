#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hstbeam/common.hpp"

namespace hstbeam {

/// Uniform linear array along the track axis.
struct ArrayGeometry {
    int num_elements = 1;
    double element_spacing_m = 0.0;   // 0 -> half wavelength
    double carrier_wavelength_m = 0.0;

    static ArrayGeometry half_wavelength(int n, double wavelength_m) {
        return ArrayGeometry{n, wavelength_m / 2.0, wavelength_m};
    }

    void validate() const {
        if (num_elements < 1) throw std::invalid_argument("ArrayGeometry: num_elements < 1");
        if (!(element_spacing_m > 0.0))
            throw std::invalid_argument("ArrayGeometry: element_spacing must be > 0");
        if (!(carrier_wavelength_m > 0.0))
            throw std::invalid_argument("ArrayGeometry: wavelength must be > 0");
    }
};

/// Unit-norm ULA steering vector; angle is measured from array broadside.
/// Element k carries phase k * (2*pi/lambda) * d * sin(angle).
inline Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double angle_rad) {
    geom.validate();
    if (!std::isfinite(angle_rad))
        throw std::invalid_argument("steering_vector: non-finite angle");
    if (angle_rad <= -kPi / 2 - 1e-12 || angle_rad > kPi / 2 + 1e-12)
        throw std::invalid_argument("steering_vector: angle outside (-pi/2, pi/2]");
    const int n = geom.num_elements;
    const double phase_step =
        2.0 * kPi / geom.carrier_wavelength_m * geom.element_spacing_m * std::sin(angle_rad);
    Eigen::VectorXcd v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k)
        v(k) = std::polar(scale, phase_step * static_cast<double>(k));
    return v;
}

/// Trackside scene: the radio head sits `track_offset_m` from the track in +y,
/// a reflecting building line runs parallel to the track at -building_offset_m.
/// The train enters the coverage segment at x = 0 and moves in +x.
struct SceneGeometry {
    double coverage_length_m = 500.0;
    double track_offset_m = 5.0;
    double building_offset_m = 30.0;
    double train_speed_mps = 100.0;
    double tti_s = 0.25e-3;
    double carrier_wavelength_m = kSpeedOfLight / 28e9;

    double mast_x() const { return coverage_length_m / 2.0; }
    double train_x(double time_s) const { return train_speed_mps * time_s; }
    double slot_time(std::int64_t slot) const { return static_cast<double>(slot) * tti_s; }
};

/// Departure/arrival geometry of one straight segment toward a point that is
/// `lateral_m` off the track. Angles are broadside-referenced, i.e.
/// asin(longitudinal component of the unit direction), always in [-pi/2, pi/2].
struct RayGeometry {
    double angle_rad = 0.0;
    double distance_m = 0.0;
};

inline RayGeometry ray_to_point(double from_x, double to_x, double lateral_m) {
    const double dx = to_x - from_x;
    const double r = std::hypot(dx, lateral_m);
    return RayGeometry{std::asin(dx / r), r};
}

struct LosGeometry {
    double aod_rad = 0.0;       // at the radio head
    double aoa_rad = 0.0;       // at the train terminal
    double distance_m = 0.0;
    double doppler_hz = 0.0;
};

/// Line-of-sight geometry at a timeslot. Doppler is positive while the train
/// approaches the mast: nu = (v/lambda) * (component of velocity toward the head).
inline LosGeometry los_geometry(const SceneGeometry& scene, std::int64_t timeslot,
                                std::int64_t slots_per_traverse) {
    if (timeslot < 0 || timeslot > slots_per_traverse)
        throw std::invalid_argument("los_geometry: timeslot outside traverse horizon");
    const double x = scene.train_x(scene.slot_time(timeslot));
    const RayGeometry dep = ray_to_point(scene.mast_x(), x, scene.track_offset_m);
    const RayGeometry arr = ray_to_point(x, scene.mast_x(), scene.track_offset_m);
    const double doppler =
        scene.train_speed_mps / scene.carrier_wavelength_m * std::sin(arr.angle_rad);
    return LosGeometry{dep.angle_rad, arr.angle_rad, dep.distance_m, doppler};
}

/// Reflected-path geometry off a building-line point at longitudinal reflector_x.
inline LosGeometry reflected_geometry(const SceneGeometry& scene, double reflector_x,
                                      double train_x) {
    // head -> reflector leg: the head is at lateral +track_offset, building at
    // -building_offset, so the leg spans the full lateral gap.
    const RayGeometry dep =
        ray_to_point(scene.mast_x(), reflector_x, scene.track_offset_m + scene.building_offset_m);
    const RayGeometry arr = ray_to_point(train_x, reflector_x, scene.building_offset_m);
    const double doppler =
        scene.train_speed_mps / scene.carrier_wavelength_m * std::sin(arr.angle_rad);
    return LosGeometry{dep.angle_rad, arr.angle_rad, dep.distance_m + arr.distance_m, doppler};
}

}  // namespace hstbeam

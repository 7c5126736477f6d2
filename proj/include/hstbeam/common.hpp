#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hstbeam {

using cxd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Free-space style distance pathloss in dB, 61.4 + 34*log10(d).
inline double pathloss_db(double distance_m) {
    if (!(distance_m > 0.0))
        throw std::invalid_argument("pathloss_db: distance must be > 0, got " +
                                    std::to_string(distance_m));
    return 61.4 + 34.0 * std::log10(distance_m);
}

}  // namespace hstbeam

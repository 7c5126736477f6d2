#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hstbeam/common.hpp"
#include "hstbeam/geometry.hpp"

namespace hstbeam {

enum class CodebookSide { transmit, receive };

/// DFT beam codebook. Beams live on the normalized spatial-direction grid
/// theta_n = (n - (N+1)/2)/N, n = 1..N; the physical beam angle is
/// arcsin(theta_n * lambda / d), so with half-wavelength spacing the rows form
/// an exact unitary DFT basis over the angular domain.
struct Codebook {
    CodebookSide side = CodebookSide::transmit;
    int num_beams = 0;
    ArrayGeometry geom;
    Eigen::MatrixXcd matrix;      // row n = steering(beam_angle_n)^H
    Eigen::VectorXd grid_angles;  // normalized directions theta_n
    Eigen::VectorXd beam_angles;  // physical angles, radians

    /// The unit-norm beamforming vector of beam n (a codebook row, un-conjugated).
    Eigen::VectorXcd beamformer(int n) const { return matrix.row(n).adjoint(); }
};

inline Codebook make_dft_codebook(CodebookSide side, const ArrayGeometry& geom) {
    geom.validate();
    const int n = geom.num_elements;
    Codebook cb;
    cb.side = side;
    cb.num_beams = n;
    cb.geom = geom;
    cb.matrix.resize(n, n);
    cb.grid_angles.resize(n);
    cb.beam_angles.resize(n);
    const double dir_to_sin = geom.carrier_wavelength_m / geom.element_spacing_m;
    for (int i = 0; i < n; ++i) {
        const double theta = (static_cast<double>(i + 1) - (n + 1) / 2.0) / n;
        const double s = theta * dir_to_sin;
        if (std::abs(s) > 1.0)
            throw std::invalid_argument("make_dft_codebook: grid direction not realizable");
        cb.grid_angles(i) = theta;
        cb.beam_angles(i) = std::asin(s);
        cb.matrix.row(i) = steering_vector(geom, cb.beam_angles(i)).adjoint();
    }
    return cb;
}

/// Beam-pair (arm) indexing: arm = q * Nt + p, p transmit beam, q receive beam.
struct BeamPair {
    int tx = 0;
    int rx = 0;
};

inline int arm_of(const BeamPair& pair, int num_tx_beams) {
    return pair.rx * num_tx_beams + pair.tx;
}

inline BeamPair pair_of(int arm_id, int num_tx_beams) {
    return BeamPair{arm_id % num_tx_beams, arm_id / num_tx_beams};
}

/// Beamspace image of the physical channel: entry (q, p) is
/// w_q^H H f_p / sqrt(Nt*Nr); sparse channels map to sparse matrices.
inline Eigen::MatrixXcd virtual_channel(const Eigen::MatrixXcd& h, const Codebook& tx_cb,
                                        const Codebook& rx_cb) {
    if (h.rows() != rx_cb.num_beams || h.cols() != tx_cb.num_beams)
        throw std::invalid_argument("virtual_channel: dimension mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(tx_cb.num_beams) * rx_cb.num_beams);
    return scale * (rx_cb.matrix * h * tx_cb.matrix.adjoint());
}

/// Exact inverse of virtual_channel (the codebooks are unitary).
inline Eigen::MatrixXcd inverse_virtual_channel(const Eigen::MatrixXcd& hv, const Codebook& tx_cb,
                                                const Codebook& rx_cb) {
    const double scale = std::sqrt(static_cast<double>(tx_cb.num_beams) * rx_cb.num_beams);
    return scale * (rx_cb.matrix.adjoint() * hv * tx_cb.matrix);
}

}  // namespace hstbeam

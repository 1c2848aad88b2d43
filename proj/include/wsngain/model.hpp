// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace wsngain {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Linear observation model shared by the fusion-center and the compressed
/// decentralized setting:
///
///     y = H a theta + H D v + n,   v ~ CN(0, diag(sensor_noise_var)),
///                                  n ~ CN(0, noise_var I).
///
/// `channel` is rows x N; rows are FC antennas (centralized) or retained
/// transmissions (decentralized).
struct EstimationModel {
    CMatrix channel;
    RVector sensor_noise_var;
    double noise_var = 1.0;

    int num_sensors() const { return static_cast<int>(channel.cols()); }
    int num_rows() const { return static_cast<int>(channel.rows()); }
};

}  // namespace wsngain

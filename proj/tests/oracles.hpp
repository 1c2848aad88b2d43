// SPDX-License-Identifier: Apache-2.0
// Independent reference computations for tests. Written from the model
// definitions directly, without calling the library's solvers.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "wsngain/model.hpp"

namespace oracle {

using wsngain::cdouble;
using wsngain::CMatrix;
using wsngain::CVector;
using wsngain::EstimationModel;

// 1 / (u^H C^{-1} u) with an explicit inverse from a full-pivot LU.
inline double variance(const EstimationModel& m, const CVector& a)
{
    const int rows = static_cast<int>(m.channel.rows());
    CMatrix d = CMatrix::Zero(a.size(), a.size());
    for (int i = 0; i < a.size(); ++i)
        d(i, i) = std::norm(a(i)) * m.sensor_noise_var(i);
    CMatrix c = m.channel * d * m.channel.adjoint() +
                m.noise_var * CMatrix::Identity(rows, rows);
    CVector u = m.channel * a;
    CMatrix cinv = c.fullPivLu().inverse();
    return 1.0 / (u.adjoint() * cinv * u)(0, 0).real();
}

// Sum over one sink's parents of the scalar-channel information terms.
inline double scalar_information(const std::vector<cdouble>& h, const std::vector<cdouble>& a,
                                 const std::vector<double>& v, double noise_var)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double g = std::norm(h[k] * a[k]);
        sum += g / (g * v[k] + noise_var);
    }
    return sum;
}

inline double distance(const CVector& a, const CVector& b) { return (a - b).norm(); }

// Closest Q-ary phase vector to a_hat by enumerating all Q^N candidates.
inline double quantized_best_distance(const CVector& a_hat, int levels)
{
    const int n = static_cast<int>(a_hat.size());
    std::vector<int> digit(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        CVector a(n);
        for (int i = 0; i < n; ++i)
            a(i) = std::polar(1.0, 2.0 * std::numbers::pi * digit[i] / levels);
        best = std::min(best, distance(a, a_hat));
        int pos = 0;
        while (pos < n && ++digit[pos] == levels)
            digit[pos++] = 0;
        if (pos == n)
            break;
    }
    return best;
}

// Closest selection-feasible point by trying every K-subset; within a subset
// the optimum is the scaled restriction (energy) or the phase of a_hat
// with modulus sqrt(N/K) (phase mode).
inline double selection_best_distance(const CVector& a_hat, int k, bool phase_mode)
{
    const int n = static_cast<int>(a_hat.size());
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + k, 1);
    double best = std::numeric_limits<double>::infinity();
    do {
        CVector a = CVector::Zero(n);
        for (int i = 0; i < n; ++i)
            if (mask[i])
                a(i) = a_hat(i);
        if (phase_mode) {
            for (int i = 0; i < n; ++i)
                if (mask[i])
                    a(i) = std::abs(a_hat(i)) > 0 ? a_hat(i) / std::abs(a_hat(i)) : cdouble(1.0);
            a *= std::sqrt(static_cast<double>(n) / k);
        } else {
            if (a.norm() == 0.0) {
                for (int i = 0; i < n; ++i)
                    if (mask[i])
                        a(i) = 1.0;
            }
            a *= std::sqrt(static_cast<double>(n)) / a.norm();
        }
        best = std::min(best, distance(a, a_hat));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

// Global minimum of a^H diag(q) a + 2 Re(b^H a) subject to ||a||^2 = n, via
// the secular equation: a = -(diag(q) + mu I)^{-1} b with mu > -min q chosen
// by bisection so that ||a||^2 = n. Assumes the generic (non-hard) case.
inline double sphere_qcqp_min(const Eigen::VectorXd& q, const CVector& b, double n)
{
    auto norm2 = [&](double mu) {
        double s = 0.0;
        for (int i = 0; i < q.size(); ++i)
            s += std::norm(b(i)) / ((q(i) + mu) * (q(i) + mu));
        return s;
    };
    const double lo0 = -q.minCoeff();
    double lo = lo0 + 1e-300;
    double hi = lo0 + 1.0;
    while (norm2(hi) > n)
        hi = lo0 + 2.0 * (hi - lo0);
    // shrink lo towards the pole until the norm exceeds n
    double step = hi - lo0;
    while (norm2(lo0 + step) < n && step > 1e-300)
        step *= 0.5;
    lo = lo0 + step;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm2(mid) > n ? lo : hi) = mid;
    }
    const double mu = 0.5 * (lo + hi);
    CVector a(q.size());
    for (int i = 0; i < q.size(); ++i)
        a(i) = -b(i) / (q(i) + mu);
    a *= std::sqrt(n) / a.norm();
    double f = 0.0;
    for (int i = 0; i < q.size(); ++i)
        f += q(i) * std::norm(a(i));
    return f + 2.0 * b.dot(a).real();
}

}  // namespace oracle

// Copyright 2026 The StrokeForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Closed-form fidelity energy of a single disc centered on the axis of a
// straight black band of half-width R on white. For r >= R the disc overhangs
// the band by two circular segments of total area (theta - sin theta) r^2 with
// theta = 2 acos(R / r), so
//
//     F_E(r) = c2 r^-alpha + c1 (theta - sin theta)     (r >= R)
//     F_E(r) = c2 r^-alpha                              (r <  R)

#include <strokeforge/error.hpp>

#include <cmath>

namespace strokeforge {

struct BandModel {
    double R = 10.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double alpha = 1.0;

    void validate() const {
        if (!(R > 0.0 && c1 > 0.0 && c2 > 0.0 && alpha > 0.0)) {
            throwInput("band model needs R, c1, c2, alpha > 0");
        }
    }
};

/// Segment angle theta = 2 acos(R / r); zero inside the band.
inline double segment_angle(const BandModel& m, double r) {
    if (r <= m.R) {
        return 0.0;
    }
    return 2.0 * std::acos(m.R / r);
}

/// Area of the disc lying outside the band.
inline double excess_area(const BandModel& m, double r) {
    if (r < m.R) {
        return 0.0;
    }
    const double theta = segment_angle(m, r);
    return (theta - std::sin(theta)) * r * r;
}

inline double energy_profile(const BandModel& m, double r) {
    return m.c2 * std::pow(r, -m.alpha) + m.c1 * excess_area(m, r) / (r * r);
}

/// Right-hand branch of dF_E/dr, defined for r >= R (including r = R).
inline double profile_derivative_above(const BandModel& m, double r) {
    if (r < m.R) {
        throwInput("right-hand branch needs r >= R");
    }
    const double ratio = m.R / r;
    return 4.0 * m.c1 * m.R * std::sqrt(1.0 - ratio * ratio) / (r * r) - m.c2 * m.alpha * std::pow(r, -m.alpha - 1.0);
}

/// dF_E/dr. At r = R both one-sided limits equal -c2 alpha R^(-alpha-1).
inline double profile_derivative(const BandModel& m, double r) {
    if (r <= m.R) {
        return -m.c2 * m.alpha * std::pow(r, -m.alpha - 1.0);
    }
    return profile_derivative_above(m, r);
}

/// Minimizer for alpha = 1: 4 c1 R^2 / sqrt(16 R^2 c1^2 - c2^2). Requires
/// 4 c1 R > c2; otherwise the profile has no interior minimum.
inline double closed_form_minimizer_alpha1(const BandModel& m) {
    const double disc = 16.0 * m.R * m.R * m.c1 * m.c1 - m.c2 * m.c2;
    if (!(disc > 0.0)) {
        throwNumeric("no interior minimizer: need 4 c1 R > c2");
    }
    return 4.0 * m.c1 * m.R * m.R / std::sqrt(disc);
}

/// Derivative-free minimizer of energy_profile on [lo, hi]: a uniform grid of
/// gridPoints samples, then golden-section refinement around the best one.
inline double grid_minimizer(const BandModel& m, double lo, double hi, int gridPoints = 100000) {
    if (!(hi > lo) || gridPoints < 3) {
        throwInput("grid search needs hi > lo and at least 3 points");
    }
    const double step = (hi - lo) / static_cast<double>(gridPoints - 1);
    int best = 0;
    double bestVal = energy_profile(m, lo);
    for (int k = 1; k < gridPoints; ++k) {
        const double v = energy_profile(m, lo + step * k);
        if (v < bestVal) {
            bestVal = v;
            best = k;
        }
    }
    double a = lo + step * std::max(best - 1, 0);
    double b = lo + step * std::min(best + 1, gridPoints - 1);
    const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invPhi * (b - a);
    double x2 = a + invPhi * (b - a);
    double f1 = energy_profile(m, x1);
    double f2 = energy_profile(m, x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invPhi * (b - a);
            f1 = energy_profile(m, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invPhi * (b - a);
            f2 = energy_profile(m, x2);
        }
    }
    return 0.5 * (a + b);
}

/// Default search window [1.0001 R, 20 R].
inline double grid_minimizer(const BandModel& m) {
    return grid_minimizer(m, m.R * 1.0001, 20.0 * m.R);
}

}  // namespace strokeforge

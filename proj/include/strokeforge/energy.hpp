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

// The stroke cost functional
//
//     F = c1 * int G_I(t) / r(t)^2 dt          (image coverage)
//       + c2 * int r(t)^(-alpha) dt            (radius growth)
//       + c3 * sum_k int_{t_k+eps}^{t_{k+1}-eps} |K(t)| dt   (skeleton bending)
//
// integrated with the midpoint rule over the spline parameter. The t_k in the
// bending term are the constrained (user-sampled) nodes.

#include <strokeforge/image.hpp>
#include <strokeforge/spline.hpp>
#include <strokeforge/stroke.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace strokeforge {

struct EnergyParams {
    double c1 = 2.0;
    double c2 = 2000.0;
    double c3 = 50.0;
    double alpha = 0.5;
    /// Half-width of the bending exemption around constrained nodes, node units.
    double epsilon = 0.125;
    double rMin = 3.0;
    double rMax = 50.0;
    int quadSamples = 32;
    /// Gray levels enter G_I on this scale; 255 reads them as 8-bit levels,
    /// which is the scale the default weights balance against.
    double intensityScale = 255.0;

    void validate() const {
        if (!(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0)) {
            throwInput("energy weights c1, c2, c3 must be nonnegative");
        }
        if (!(alpha > 0.0)) {
            throwInput("alpha must be positive");
        }
        if (!(epsilon > 0.0 && epsilon < 0.5)) {
            throwInput("epsilon must lie in (0, 0.5)");
        }
        if (!(rMin > 0.0 && rMin < rMax)) {
            throwInput("radius bounds need 0 < r_min < r_max");
        }
        if (quadSamples < 2) {
            throwInput("quad_samples must be at least 2");
        }
        if (!(intensityScale > 0.0)) {
            throwInput("intensity scale must be positive");
        }
    }
};

struct EnergyBreakdown {
    double total = 0.0;
    double fidelityS = 0.0;
    double fidelityR = 0.0;
    double curvature = 0.0;
};

/// Midpoint-rule abscissae over [0, n], quadSamples per node interval.
inline std::vector<double> quadrature_points(int lastNode, int quadSamples) {
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(lastNode) * static_cast<std::size_t>(quadSamples));
    for (int i = 0; i < lastNode; ++i) {
        for (int k = 0; k < quadSamples; ++k) {
            ts.push_back(static_cast<double>(i) + (static_cast<double>(k) + 0.5) / static_cast<double>(quadSamples));
        }
    }
    return ts;
}

/// Quadrature points that survive the bending exemption: those farther than
/// epsilon from every constrained node.
inline std::vector<double> curvature_points(int lastNode, int quadSamples, const std::vector<int>& constrainedNodes,
                                            double epsilon) {
    std::vector<double> kept;
    for (double t : quadrature_points(lastNode, quadSamples)) {
        bool exempt = false;
        for (int node : constrainedNodes) {
            if (std::abs(t - static_cast<double>(node)) <= epsilon) {
                exempt = true;
                break;
            }
        }
        if (!exempt) {
            kept.push_back(t);
        }
    }
    return kept;
}

inline double energy_fidelity_s(const GrayImage& img, const SplineCurve& curve, const EnergyParams& params) {
    if (params.c1 == 0.0) {
        return 0.0;
    }
    const double w = 1.0 / static_cast<double>(params.quadSamples);
    double sum = 0.0;
    for (double t : quadrature_points(curve.lastNode(), params.quadSamples)) {
        const CurvePoint c = eval_curve(curve, t);
        if (c.r < kRadiusFloor) {
            continue;
        }
        sum += gray_mass(img, {c.x, c.y, c.r}) / (c.r * c.r);
    }
    return params.c1 * params.intensityScale * sum * w;
}

inline double energy_fidelity_r(const SplineCurve& curve, const EnergyParams& params) {
    const double w = 1.0 / static_cast<double>(params.quadSamples);
    double sum = 0.0;
    for (double t : quadrature_points(curve.lastNode(), params.quadSamples)) {
        const double r = eval_curve(curve, t).r;
        if (!(r > 0.0)) {
            throwNumeric("nonpositive radius " + std::to_string(r) + " at t = " + std::to_string(t));
        }
        sum += std::pow(r, -params.alpha);
    }
    return params.c2 * sum * w;
}

inline double energy_curvature(const SplineCurve& curve, const ConstraintSet& constraints, const EnergyParams& params) {
    if (params.c3 == 0.0) {
        return 0.0;
    }
    const double w = 1.0 / static_cast<double>(params.quadSamples);
    double sum = 0.0;
    for (double t : curvature_points(curve.lastNode(), params.quadSamples, constraints.nodes(), params.epsilon)) {
        sum += std::abs(curvature(curve, t));
    }
    return params.c3 * sum * w;
}

inline EnergyBreakdown energy_total(const GrayImage& img, const SplineCurve& curve, const ConstraintSet& constraints,
                                    const EnergyParams& params) {
    EnergyBreakdown e;
    e.fidelityS = energy_fidelity_s(img, curve, params);
    e.fidelityR = params.c2 == 0.0 ? 0.0 : energy_fidelity_r(curve, params);
    e.curvature = energy_curvature(curve, constraints, params);
    e.total = e.fidelityS + e.fidelityR + e.curvature;
    return e;
}

}  // namespace strokeforge

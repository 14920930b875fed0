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

// Gradient descent with one step size per search direction. Search directions
// are the constraint null-space vectors, so every update is a combination of
// moves that leave the interpolated nodes where they are. Each step size is
// multiplied by the decay factor T whenever the directional derivative along
// it changes sign between consecutive iterations.

#include <strokeforge/energy.hpp>
#include <strokeforge/spline.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace strokeforge {

struct DescentConfig {
    double initialStep = 0.1;
    /// Initial step for radius-channel directions.
    double initialRadiusStep = 0.005;
    double decay = 0.5;
    double fdStep = 0.5;
    int maxIterations = 14;
    double rMin = 3.0;
    double rMax = 50.0;
    /// Stop once the relative drop of f_total in one iteration falls below
    /// this; 0 disables.
    double earlyStopRel = 0.0;
    /// Workers for directional derivatives; 0 picks the hardware count.
    int threads = 0;

    void validate() const {
        if (!(initialStep > 0.0 && initialRadiusStep > 0.0)) {
            throwInput("initial steps must be positive");
        }
        if (!(decay > 0.0 && decay < 1.0)) {
            throwInput("decay T must lie in (0, 1)");
        }
        if (!(fdStep > 0.0)) {
            throwInput("finite-difference step h must be positive");
        }
        if (maxIterations < 0) {
            throwInput("max iterations must be nonnegative");
        }
        if (!(rMin > 0.0 && rMin < rMax)) {
            throwInput("radius bounds need 0 < r_min < r_max");
        }
        if (!(earlyStopRel >= 0.0)) {
            throwInput("early stop threshold must be nonnegative");
        }
    }
};

struct DescentState {
    SplineCurve curve;
    std::vector<double> stepSizes;
    std::vector<double> prevDerivs;
    int iteration = 0;
};

inline DescentState initial_state(SplineCurve curve, std::span<const Direction> directions, const DescentConfig& config) {
    DescentState s;
    s.curve = std::move(curve);
    s.stepSizes.reserve(directions.size());
    for (const auto& d : directions) {
        s.stepSizes.push_back(d.channel == Channel::R ? config.initialRadiusStep : config.initialStep);
    }
    s.prevDerivs.assign(directions.size(), 0.0);
    return s;
}

/// Forward difference (F(x + h v) - F(x)) / h along a unit vector v.
template <class Objective>
double directional_derivative(Objective&& objective, std::span<const double> coeffs, std::span<const double> direction,
                              double h) {
    if (coeffs.size() != direction.size()) {
        throwInput("direction and coefficient vectors differ in size");
    }
    double norm2 = 0.0;
    for (double v : direction) {
        norm2 += v * v;
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
        throwInput("directional derivative needs a unit direction");
    }
    std::vector<double> x(coeffs.begin(), coeffs.end());
    const double f0 = objective(std::span<const double>(x));
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] += h * direction[k];
    }
    const double f1 = objective(std::span<const double>(x));
    return (f1 - f0) / h;
}

/// Same forward difference on a curve, with F(x) supplied by the caller.
template <class Objective>
double directional_derivative(const Objective& objective, const SplineCurve& curve, const Direction& dir, double h,
                              double f0) {
    SplineCurve moved = curve;
    apply_direction(moved, dir, h);
    return (objective(moved) - f0) / h;
}

namespace detail {

inline int workerCount(int requested, std::size_t jobs) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(1, n);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

// Runs body(k) for k in [0, jobs). Each k is written by exactly one worker, so
// results do not depend on the worker count.
template <class Body>
void parallelFor(std::size_t jobs, int threads, Body&& body) {
    const int workers = workerCount(threads, jobs);
    if (workers <= 1) {
        for (std::size_t k = 0; k < jobs; ++k) {
            body(k);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = static_cast<std::size_t>(w); k < jobs; k += static_cast<std::size_t>(workers)) {
                        body(k);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace detail

/// Projects every radius coefficient into [rMin, rMax], then re-solves the
/// center coefficient of any radius-constrained node so its node value stays
/// exact.
inline void clamp_radii(SplineCurve& curve, const ConstraintSet& constraints, double rMin, double rMax) {
    for (auto& c : curve.controlPoints()) {
        c.r = std::clamp(c.r, rMin, rMax);
    }
    for (const auto& c : constraints.entries()) {
        if (c.mask.r) {
            curve.at(c.node).r = (6.0 * c.target.r - curve.at(c.node - 1).r - curve.at(c.node + 1).r) / 4.0;
        }
    }
}

/// One modified descent iteration: directional derivatives along every
/// direction, sign-based step decay, the combined update, then the radius
/// projection.
template <class Objective>
DescentState descent_step(DescentState state, const Objective& objective, std::span<const Direction> directions,
                          const ConstraintSet& constraints, const DescentConfig& config) {
    const std::size_t m = directions.size();
    if (state.stepSizes.size() != m || state.prevDerivs.size() != m) {
        throwInput("descent state is sized for " + std::to_string(state.stepSizes.size()) + " directions, got " +
                   std::to_string(m));
    }
    const double f0 = objective(state.curve);
    std::vector<double> derivs(m, 0.0);
    detail::parallelFor(m, config.threads, [&](std::size_t k) {
        derivs[k] = directional_derivative(objective, state.curve, directions[k], config.fdStep, f0);
    });

    for (std::size_t k = 0; k < m; ++k) {
        if (state.iteration > 0 && !(derivs[k] * state.prevDerivs[k] > 0.0)) {
            state.stepSizes[k] *= config.decay;
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (derivs[k] != 0.0) {
            apply_direction(state.curve, directions[k], -state.stepSizes[k] * derivs[k]);
        }
    }
    clamp_radii(state.curve, constraints, config.rMin, config.rMax);
    state.prevDerivs = std::move(derivs);
    ++state.iteration;
    return state;
}

struct DescentRun {
    DescentState state;
    std::vector<EnergyBreakdown> trace;
};

/// Called after the baseline (iteration 0) and after every step.
using IterationObserver = std::function<void(int iteration, const EnergyBreakdown&, const SplineCurve&)>;

inline DescentRun run_descent(const GrayImage& img, const SplineCurve& initial, const ConstraintSet& constraints,
                              const EnergyParams& params, const DescentConfig& config,
                              const IterationObserver& observe = {}) {
    params.validate();
    config.validate();
    const auto directions = constraint_nullspace(constraints, initial.lastNode());
    const auto objective = [&](const SplineCurve& c) { return energy_total(img, c, constraints, params).total; };

    const auto measure = [&](const SplineCurve& c, int it) {
        const EnergyBreakdown e = energy_total(img, c, constraints, params);
        if (!std::isfinite(e.total)) {
            throwNumeric("energy is not finite at iteration " + std::to_string(it));
        }
        return e;
    };

    DescentRun run;
    run.state = initial_state(initial, directions, config);
    run.trace.push_back(measure(run.state.curve, 0));
    if (observe) {
        observe(0, run.trace.back(), run.state.curve);
    }
    for (int it = 0; it < config.maxIterations; ++it) {
        run.state = descent_step(std::move(run.state), objective, directions, constraints, config);
        run.trace.push_back(measure(run.state.curve, run.state.iteration));
        if (observe) {
            observe(run.state.iteration, run.trace.back(), run.state.curve);
        }
        if (config.earlyStopRel > 0.0) {
            const double prev = run.trace[run.trace.size() - 2].total;
            const double cur = run.trace.back().total;
            if (prev != 0.0 && (prev - cur) / std::abs(prev) < config.earlyStopRel) {
                break;
            }
        }
    }
    return run;
}

}  // namespace strokeforge

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

// Uniform cubic B-spline stroke curves carrying a pen radius channel.
//
// A curve over nodes t_0 .. t_n (consecutive integers) is described by n + 3
// control points c_{-1} .. c_{n+1}, each a triple (x, y, r) in pixels:
//
//     gamma(t) = sum_j c_j B_j(t)
//
// where B_j is the cardinal cubic B-spline centered at j. At an integer node
// the curve value is (c_{i-1} + 4 c_i + c_{i+1}) / 6, which is the relation the
// constraint algebra below is built on.

#include <strokeforge/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace strokeforge {

enum class Channel : int { X = 0, Y = 1, R = 2 };

inline constexpr int kChannelCount = 3;

struct ControlPoint {
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;

    double& operator[](Channel c) { return c == Channel::X ? x : (c == Channel::Y ? y : r); }
    double operator[](Channel c) const { return c == Channel::X ? x : (c == Channel::Y ? y : r); }

    friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

/// A point on the curve: pen center and radius.
struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
};

struct CurveDerivatives {
    double dx = 0.0;
    double dy = 0.0;
    double dr = 0.0;
    double ddx = 0.0;
    double ddy = 0.0;
};

/// Squared skeleton speed below which curvature is reported as zero.
inline constexpr double kSpeedFloor = 1e-8;

class SplineCurve {
public:
    SplineCurve() = default;

    /// `controlPoints` lists c_{-1} .. c_{n+1}; there must be at least 4 of them
    /// (one node interval).
    explicit SplineCurve(std::vector<ControlPoint> controlPoints)
        : coeffs_(std::move(controlPoints)) {
        if (coeffs_.size() < 4) {
            throwInput("spline needs at least 4 control points (one node interval), got " +
                       std::to_string(coeffs_.size()));
        }
    }

    /// Constant curve over `intervals` node intervals.
    static SplineCurve constant(int intervals, ControlPoint value) {
        if (intervals < 1) {
            throwInput("spline needs at least one node interval");
        }
        return SplineCurve(std::vector<ControlPoint>(static_cast<std::size_t>(intervals) + 3, value));
    }

    /// n, the index of the last node. Nodes are 0 .. n.
    int lastNode() const { return static_cast<int>(coeffs_.size()) - 3; }
    int nodeCount() const { return lastNode() + 1; }
    int coefficientCount() const { return static_cast<int>(coeffs_.size()); }

    /// Control point c_j for j in [-1, n+1].
    const ControlPoint& at(int j) const { return coeffs_[static_cast<std::size_t>(j + 1)]; }
    ControlPoint& at(int j) { return coeffs_[static_cast<std::size_t>(j + 1)]; }

    /// Storage order: index 0 holds c_{-1}.
    const std::vector<ControlPoint>& controlPoints() const { return coeffs_; }
    std::vector<ControlPoint>& controlPoints() { return coeffs_; }

    /// Row-major flattening (x, y, r per control point), 3 (n + 3) values.
    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(coeffs_.size() * 3);
        for (const auto& c : coeffs_) {
            out.push_back(c.x);
            out.push_back(c.y);
            out.push_back(c.r);
        }
        return out;
    }

    void assign(const std::vector<double>& flat) {
        if (flat.size() != coeffs_.size() * 3) {
            throwInput("flattened coefficient vector has wrong size");
        }
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            coeffs_[k] = {flat[3 * k], flat[3 * k + 1], flat[3 * k + 2]};
        }
    }

    friend bool operator==(const SplineCurve&, const SplineCurve&) = default;

private:
    std::vector<ControlPoint> coeffs_;
};

namespace detail {

// Locates the node interval [i, i+1] holding t and the local parameter u.
// t == n belongs to the last interval with u == 1.
inline std::pair<int, double> locate(const SplineCurve& curve, double t) {
    const int n = curve.lastNode();
    if (!(t >= 0.0 && t <= static_cast<double>(n))) {
        throwInput("curve parameter " + std::to_string(t) + " outside [0, " + std::to_string(n) + "]");
    }
    int i = static_cast<int>(std::floor(t));
    if (i >= n) {
        i = n - 1;
    }
    return {i, t - static_cast<double>(i)};
}

// Weights of c_{i-1} .. c_{i+2} on the interval [i, i+1].
inline std::array<double, 4> basisWeights(double u) {
    const double v = 1.0 - u;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return {v * v * v / 6.0,
            (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0,
            (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0,
            u3 / 6.0};
}

inline std::array<double, 4> basisFirstDerivatives(double u) {
    const double v = 1.0 - u;
    const double u2 = u * u;
    return {-v * v / 2.0, (3.0 * u2 - 4.0 * u) / 2.0, (-3.0 * u2 + 2.0 * u + 1.0) / 2.0, u2 / 2.0};
}

inline std::array<double, 4> basisSecondDerivatives(double u) {
    return {1.0 - u, 3.0 * u - 2.0, -3.0 * u + 1.0, u};
}

}  // namespace detail

inline CurvePoint eval_curve(const SplineCurve& curve, double t) {
    const auto [i, u] = detail::locate(curve, t);
    const auto w = detail::basisWeights(u);
    CurvePoint p;
    for (int k = 0; k < 4; ++k) {
        const ControlPoint& c = curve.at(i - 1 + k);
        p.x += w[k] * c.x;
        p.y += w[k] * c.y;
        p.r += w[k] * c.r;
    }
    return p;
}

inline CurveDerivatives eval_derivatives(const SplineCurve& curve, double t) {
    const auto [i, u] = detail::locate(curve, t);
    const auto d1 = detail::basisFirstDerivatives(u);
    const auto d2 = detail::basisSecondDerivatives(u);
    CurveDerivatives d;
    for (int k = 0; k < 4; ++k) {
        const ControlPoint& c = curve.at(i - 1 + k);
        d.dx += d1[k] * c.x;
        d.dy += d1[k] * c.y;
        d.dr += d1[k] * c.r;
        d.ddx += d2[k] * c.x;
        d.ddy += d2[k] * c.y;
    }
    return d;
}

/// Signed curvature of the skeleton (x, y), in 1/pixels.
inline double curvature(const SplineCurve& curve, double t) {
    const CurveDerivatives d = eval_derivatives(curve, t);
    const double speed2 = d.dx * d.dx + d.dy * d.dy;
    if (speed2 < kSpeedFloor) {
        return 0.0;
    }
    return (d.dx * d.ddy - d.dy * d.ddx) / (speed2 * std::sqrt(speed2));
}

/// Value at integer node i straight from the three-coefficient stencil.
inline double node_value(const SplineCurve& curve, int node, Channel ch) {
    return (curve.at(node - 1)[ch] + 4.0 * curve.at(node)[ch] + curve.at(node + 1)[ch]) / 6.0;
}

// ---------------------------------------------------------------------------
// Interpolation constraints and their null space.

struct ChannelMask {
    bool x = true;
    bool y = true;
    bool r = false;

    bool has(Channel c) const { return c == Channel::X ? x : (c == Channel::Y ? y : r); }
    static ChannelMask all() { return {true, true, true}; }
};

struct Constraint {
    int node = 0;
    CurvePoint target;
    ChannelMask mask;
};

class ConstraintSet {
public:
    ConstraintSet() = default;
    explicit ConstraintSet(std::vector<Constraint> entries) : entries_(std::move(entries)) {}

    void add(Constraint c) { entries_.push_back(c); }
    const std::vector<Constraint>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    /// Node indices touching at least one channel, in insertion order.
    std::vector<int> nodes() const {
        std::vector<int> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) {
            out.push_back(e.node);
        }
        return out;
    }

    /// Throws when a node index is outside [0, lastNode] or when two
    /// constraints sharing a channel sit on the same or adjacent nodes.
    void validate(int lastNode) const {
        for (const auto& e : entries_) {
            if (e.node < 0 || e.node > lastNode) {
                throwInput("constrained node " + std::to_string(e.node) + " outside [0, " +
                           std::to_string(lastNode) + "]");
            }
        }
        for (std::size_t a = 0; a < entries_.size(); ++a) {
            for (std::size_t b = a + 1; b < entries_.size(); ++b) {
                const Constraint& ca = entries_[a];
                const Constraint& cb = entries_[b];
                const bool shareChannel = (ca.mask.x && cb.mask.x) || (ca.mask.y && cb.mask.y) ||
                                          (ca.mask.r && cb.mask.r);
                if (shareChannel && std::abs(ca.node - cb.node) < 2) {
                    throwInput("constrained nodes " + std::to_string(ca.node) + " and " +
                               std::to_string(cb.node) +
                               " need at least one free node between them");
                }
            }
        }
    }

private:
    std::vector<Constraint> entries_;
};

/// Largest |gamma(t_i) - f_i| over all constrained channels.
inline double max_constraint_residual(const SplineCurve& curve, const ConstraintSet& constraints) {
    double worst = 0.0;
    for (const auto& c : constraints.entries()) {
        for (Channel ch : {Channel::X, Channel::Y, Channel::R}) {
            if (!c.mask.has(ch)) {
                continue;
            }
            const CurvePoint v = eval_curve(curve, static_cast<double>(c.node));
            const double got = ch == Channel::X ? v.x : (ch == Channel::Y ? v.y : v.r);
            const double want = ch == Channel::X ? c.target.x : (ch == Channel::Y ? c.target.y : c.target.r);
            worst = std::max(worst, std::abs(got - want));
        }
    }
    return worst;
}

/// A unit-length coefficient perturbation confined to one channel. Entries
/// index the control point storage (0 holds c_{-1}).
struct Direction {
    Channel channel = Channel::X;
    std::vector<std::pair<int, double>> entries;

    /// Dense view over the flattened 3 (n + 3) coefficient vector.
    std::vector<double> dense(int coefficientCount) const {
        std::vector<double> out(static_cast<std::size_t>(coefficientCount) * kChannelCount, 0.0);
        for (const auto& [idx, w] : entries) {
            out[static_cast<std::size_t>(idx) * kChannelCount + static_cast<std::size_t>(channel)] = w;
        }
        return out;
    }
};

/// Adds `amount * direction` to the curve coefficients.
inline void apply_direction(SplineCurve& curve, const Direction& dir, double amount) {
    auto& cps = curve.controlPoints();
    for (const auto& [idx, w] : dir.entries) {
        cps[static_cast<std::size_t>(idx)][dir.channel] += amount * w;
    }
}

/// Basis of coefficient perturbations that leave every constrained node value
/// unchanged, per channel.
///
/// Each constraint row (1, 4, 1) at node i has its center coefficient c_i as
/// pivot. Because constrained nodes are at least two apart, no pivot is
/// touched by another row, so every non-pivot coefficient j yields the
/// direction e_j - (1/4) sum of e_pivot over the rows that touch j. For an
/// isolated constraint this gives (1, -1/4, 0) and (0, -1/4, 1); a coefficient
/// shared by two neighboring constraints compensates both pivots.
///
/// Directions are ordered by channel, then by coefficient, and normalized to
/// unit length.
inline std::vector<Direction> constraint_nullspace(const ConstraintSet& constraints, int lastNode) {
    constraints.validate(lastNode);
    const int m = lastNode + 3;
    std::vector<Direction> out;
    for (Channel ch : {Channel::X, Channel::Y, Channel::R}) {
        // pivotOf[k] = storage index of the pivot for the row whose stencil
        // covers coefficient k (up to two rows per coefficient).
        std::vector<bool> isPivot(static_cast<std::size_t>(m), false);
        std::vector<std::vector<int>> rowsTouching(static_cast<std::size_t>(m));
        for (const auto& c : constraints.entries()) {
            if (!c.mask.has(ch)) {
                continue;
            }
            const int pivot = c.node + 1;  // storage index of c_i
            isPivot[static_cast<std::size_t>(pivot)] = true;
            rowsTouching[static_cast<std::size_t>(pivot - 1)].push_back(pivot);
            rowsTouching[static_cast<std::size_t>(pivot + 1)].push_back(pivot);
        }
        for (int j = 0; j < m; ++j) {
            if (isPivot[static_cast<std::size_t>(j)]) {
                continue;
            }
            Direction d;
            d.channel = ch;
            d.entries.emplace_back(j, 1.0);
            for (int pivot : rowsTouching[static_cast<std::size_t>(j)]) {
                d.entries.emplace_back(pivot, -0.25);
            }
            double norm2 = 0.0;
            for (const auto& e : d.entries) {
                norm2 += e.second * e.second;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& e : d.entries) {
                e.second *= inv;
            }
            std::sort(d.entries.begin(), d.entries.end());
            out.push_back(std::move(d));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spline JSON: { "nodes": n+1, "control_points": [[cx, cy, cr], ...] }

namespace detail {

inline std::string formatReal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // Keep it a JSON number that still reads as real.
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace detail

inline std::string spline_to_json(const SplineCurve& curve) {
    std::ostringstream os;
    os << "{\n  \"nodes\": " << curve.nodeCount() << ",\n  \"control_points\": [\n";
    const auto& cps = curve.controlPoints();
    for (std::size_t k = 0; k < cps.size(); ++k) {
        os << "    [" << detail::formatReal(cps[k].x) << ", " << detail::formatReal(cps[k].y) << ", "
           << detail::formatReal(cps[k].r) << "]" << (k + 1 < cps.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

inline SplineCurve spline_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("control_points")) {
        throwInput("spline JSON needs \"nodes\" and \"control_points\"");
    }
    const int nodes = doc.at("nodes").get<int>();
    const auto& arr = doc.at("control_points");
    if (!arr.is_array() || static_cast<int>(arr.size()) != nodes + 2) {
        throwInput("spline JSON: expected nodes + 2 control points");
    }
    std::vector<ControlPoint> cps;
    cps.reserve(arr.size());
    for (const auto& row : arr) {
        if (!row.is_array() || row.size() != 3) {
            throwInput("spline JSON: each control point is [cx, cy, cr]");
        }
        cps.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return SplineCurve(std::move(cps));
}

inline SplineCurve spline_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throwInput(std::string("spline JSON: ") + e.what());
    }
    return spline_from_json(doc);
}

}  // namespace strokeforge

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

// Stroke restoration end to end: user sample points become interpolated
// nodes, a free node is inserted between each consecutive pair, the initial
// spline follows the sample polyline, and the descent develops it against the
// image.

#include <strokeforge/energy.hpp>
#include <strokeforge/image.hpp>
#include <strokeforge/optimizer.hpp>
#include <strokeforge/spline.hpp>
#include <strokeforge/stroke.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace strokeforge {

/// Why the operator picked a point. Carried along, never interpreted.
enum class PointKind { Unspecified, Endpoint, Intersection, CurvatureExtremum, Gap, Densify };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::Endpoint: return "endpoint";
        case PointKind::Intersection: return "intersection";
        case PointKind::CurvatureExtremum: return "curvature-extremum";
        case PointKind::Gap: return "gap";
        case PointKind::Densify: return "densify";
        case PointKind::Unspecified: break;
    }
    return "";
}

inline PointKind point_kind_from_string(const std::string& s) {
    if (s.empty()) return PointKind::Unspecified;
    if (s == "endpoint") return PointKind::Endpoint;
    if (s == "intersection") return PointKind::Intersection;
    if (s == "curvature-extremum") return PointKind::CurvatureExtremum;
    if (s == "gap") return PointKind::Gap;
    if (s == "densify") return PointKind::Densify;
    throwInput("unknown point kind \"" + s + "\"");
}

struct SamplePoint {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> r;
    PointKind kind = PointKind::Unspecified;
};

using SamplePointSet = std::vector<SamplePoint>;

inline void validate_points(const SamplePointSet& points, std::optional<ImageBounds> bounds = std::nullopt) {
    if (points.size() < 2) {
        throwInput("a stroke needs at least 2 points, got " + std::to_string(points.size()));
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& pt = points[k];
        if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
            throwInput("point " + std::to_string(k) + " has non-finite coordinates");
        }
        if (pt.r && !(*pt.r > 0.0)) {
            throwInput("point " + std::to_string(k) + " has a nonpositive radius");
        }
        if (bounds && (pt.x < 0.0 || pt.y < 0.0 || pt.x > bounds->width - 1 || pt.y > bounds->height - 1)) {
            throwInput("point " + std::to_string(k) + " lies outside the image");
        }
    }
}

inline SamplePointSet points_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("points") || !doc.at("points").is_array()) {
        throwInput("points JSON needs a \"points\" array");
    }
    SamplePointSet out;
    for (const auto& item : doc.at("points")) {
        if (!item.is_object() || !item.contains("x") || !item.contains("y") || !item.at("x").is_number() ||
            !item.at("y").is_number()) {
            throwInput("each point needs numeric \"x\" and \"y\"");
        }
        SamplePoint pt;
        pt.x = item.at("x").get<double>();
        pt.y = item.at("y").get<double>();
        if (item.contains("r") && !item.at("r").is_null()) {
            if (!item.at("r").is_number()) {
                throwInput("point radius must be numeric");
            }
            pt.r = item.at("r").get<double>();
        }
        if (item.contains("kind") && !item.at("kind").is_null()) {
            pt.kind = point_kind_from_string(item.at("kind").get<std::string>());
        }
        out.push_back(pt);
    }
    return out;
}

inline SamplePointSet points_from_json(const std::string& text) {
    try {
        return points_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throwInput(std::string("points JSON: ") + e.what());
    }
}

inline nlohmann::json points_to_json(const SamplePointSet& points) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& pt : points) {
        nlohmann::json item = {{"x", pt.x}, {"y", pt.y}};
        if (pt.r) {
            item["r"] = *pt.r;
        }
        if (pt.kind != PointKind::Unspecified) {
            item["kind"] = to_string(pt.kind);
        }
        arr.push_back(item);
    }
    return {{"points", arr}};
}

// ---------------------------------------------------------------------------

struct NodeLayout {
    int lastNode = 0;
    std::vector<int> constrained;
};

/// Sample k sits on node 2k with one free node between consecutive samples.
inline NodeLayout layout_nodes(const SamplePointSet& points) {
    if (points.size() < 2) {
        throwInput("a stroke needs at least 2 points, got " + std::to_string(points.size()));
    }
    NodeLayout layout;
    layout.lastNode = 2 * (static_cast<int>(points.size()) - 1);
    for (int k = 0; k < static_cast<int>(points.size()); ++k) {
        layout.constrained.push_back(2 * k);
    }
    return layout;
}

inline ConstraintSet constraints_for(const SamplePointSet& points, const NodeLayout& layout) {
    ConstraintSet cs;
    for (std::size_t k = 0; k < points.size(); ++k) {
        Constraint c;
        c.node = layout.constrained[k];
        c.target = {points[k].x, points[k].y, points[k].r.value_or(0.0)};
        c.mask = {true, true, points[k].r.has_value()};
        cs.add(c);
    }
    return cs;
}

/// Coefficients c_{-1} .. c_{n+1} of the curve through node values
/// values[0 .. n] with natural ends (c_{-1} - 2 c_0 + c_1 = 0 and likewise at
/// the far end). The ends force c_0 = values[0] and c_n = values[n]; the
/// interior rows c_{i-1} + 4 c_i + c_{i+1} = 6 values[i] are solved with the
/// Thomas algorithm.
inline std::vector<double> interpolate_nodes(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size()) - 1;
    if (n < 1) {
        throwInput("interpolation needs at least two node values");
    }
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);  // c_0 .. c_n
    c[0] = values[0];
    c[static_cast<std::size_t>(n)] = values[static_cast<std::size_t>(n)];
    const int interior = n - 1;
    if (interior > 0) {
        std::vector<double> diag(static_cast<std::size_t>(interior), 4.0);
        std::vector<double> rhs(static_cast<std::size_t>(interior));
        for (int i = 1; i <= interior; ++i) {
            rhs[static_cast<std::size_t>(i - 1)] = 6.0 * values[static_cast<std::size_t>(i)];
        }
        rhs.front() -= c[0];
        rhs.back() -= c[static_cast<std::size_t>(n)];
        for (int i = 1; i < interior; ++i) {
            const double w = 1.0 / diag[static_cast<std::size_t>(i - 1)];
            diag[static_cast<std::size_t>(i)] -= w;
            rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
        }
        for (int i = interior - 1; i >= 0; --i) {
            double v = rhs[static_cast<std::size_t>(i)];
            if (i + 1 < interior) {
                v -= c[static_cast<std::size_t>(i + 2)];
            }
            if (diag[static_cast<std::size_t>(i)] == 0.0) {
                throwNumeric("singular node interpolation system");
            }
            c[static_cast<std::size_t>(i + 1)] = v / diag[static_cast<std::size_t>(i)];
        }
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 3);
    out.push_back(2.0 * c[0] - (n >= 1 ? c[1] : c[0]));
    out.insert(out.end(), c.begin(), c.end());
    out.push_back(2.0 * c[static_cast<std::size_t>(n)] - c[static_cast<std::size_t>(n - 1)]);
    return out;
}

/// Initial radius at a point: the largest r on a 0.5 px ladder starting at
/// rMin whose disc still has mean gray <= inkMean, or max(rMin, 5) if even rMin
/// fails.
inline double probe_radius(const GrayImage& img, double x, double y, double rMin, double rMax,
                           double inkMean = 0.05) {
    constexpr double kLadder = 0.5;
    auto meanGray = [&](double r) {
        std::size_t count = 0;
        double sum = 0.0;
        for_each_disc_pixel(Disc{x, y, r}, [&](int p, int q) {
            ++count;
            sum += img.contains(p, q) ? img.at(p, q) : 1.0;
        });
        return count == 0 ? 1.0 : sum / static_cast<double>(count);
    };
    if (meanGray(rMin) > inkMean) {
        return std::min(std::max(rMin, 5.0), rMax);
    }
    double best = rMin;
    for (double r = rMin + kLadder; r <= rMax; r += kLadder) {
        if (meanGray(r) > inkMean) {
            break;
        }
        best = r;
    }
    return best;
}

/// Piecewise-linear start: node targets are the sample points and segment
/// midpoints, and each channel is interpolated through them exactly.
inline SplineCurve initial_spline(const SamplePointSet& points, const NodeLayout& layout, const GrayImage* img,
                                  double rMin, double rMax, double inkMean = 0.05) {
    const int n = layout.lastNode;
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    std::vector<double> ys(xs.size());
    std::vector<double> rs(xs.size());
    auto radiusAt = [&](double x, double y) {
        return img ? probe_radius(*img, x, y, rMin, rMax, inkMean) : std::min(std::max(rMin, 5.0), rMax);
    };
    for (std::size_t k = 0; k < points.size(); ++k) {
        const std::size_t node = static_cast<std::size_t>(layout.constrained[k]);
        xs[node] = points[k].x;
        ys[node] = points[k].y;
        rs[node] = points[k].r ? *points[k].r : radiusAt(points[k].x, points[k].y);
    }
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        const std::size_t a = static_cast<std::size_t>(layout.constrained[k]);
        const std::size_t b = static_cast<std::size_t>(layout.constrained[k + 1]);
        for (std::size_t node = a + 1; node < b; ++node) {
            const double s = static_cast<double>(node - a) / static_cast<double>(b - a);
            xs[node] = xs[a] + s * (xs[b] - xs[a]);
            ys[node] = ys[a] + s * (ys[b] - ys[a]);
            rs[node] = radiusAt(xs[node], ys[node]);
        }
    }
    const auto cx = interpolate_nodes(xs);
    const auto cy = interpolate_nodes(ys);
    const auto cr = interpolate_nodes(rs);
    std::vector<ControlPoint> cps(cx.size());
    for (std::size_t k = 0; k < cps.size(); ++k) {
        cps[k] = {cx[k], cy[k], cr[k]};
    }
    return SplineCurve(std::move(cps));
}

// ---------------------------------------------------------------------------

struct RestoreOptions {
    EnergyParams energy;
    DescentConfig descent;
    int renderSamples = kDefaultRenderSamples;
    /// Mean-gray ceiling for the initial radius probe.
    double probeInkMean = 0.05;
};

struct RestorationResult {
    SplineCurve curve;
    std::vector<EnergyBreakdown> trace;
    BinaryMask mask;
    ConstraintSet constraints;
    RestoreOptions options;
};

/// Runs the whole restoration on an already contrast-stretched image.
inline RestorationResult restore(const GrayImage& img, const SamplePointSet& points, const RestoreOptions& options,
                                 const IterationObserver& observe = {}) {
    options.energy.validate();
    options.descent.validate();
    validate_points(points, bounds_of(img));
    const NodeLayout layout = layout_nodes(points);
    const ConstraintSet constraints = constraints_for(points, layout);
    SplineCurve curve =
        initial_spline(points, layout, &img, options.descent.rMin, options.descent.rMax, options.probeInkMean);
    clamp_radii(curve, constraints, options.descent.rMin, options.descent.rMax);

    DescentRun run = run_descent(img, curve, constraints, options.energy, options.descent, observe);

    RestorationResult result;
    result.mask = render_stroke(run.state.curve, options.renderSamples, bounds_of(img));
    result.curve = std::move(run.state.curve);
    result.trace = std::move(run.trace);
    result.constraints = constraints;
    result.options = options;
    return result;
}

/// Pixelwise OR of the stroke masks.
inline BinaryMask overlay_strokes(const std::vector<BinaryMask>& masks) {
    if (masks.empty()) {
        throwInput("overlay needs at least one mask");
    }
    BinaryMask out = masks.front();
    for (std::size_t k = 1; k < masks.size(); ++k) {
        out |= masks[k];
    }
    return out;
}

inline BinaryMask overlay_strokes(const std::vector<RestorationResult>& results) {
    std::vector<BinaryMask> masks;
    masks.reserve(results.size());
    for (const auto& r : results) {
        masks.push_back(r.mask);
    }
    return overlay_strokes(masks);
}

inline std::string trace_to_csv(const std::vector<EnergyBreakdown>& trace) {
    std::ostringstream os;
    os << "iter,f_total,f_fid_s,f_fid_r,f_curv\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& e = trace[k];
        os << k << ',' << detail::formatReal(e.total) << ',' << detail::formatReal(e.fidelityS) << ','
           << detail::formatReal(e.fidelityR) << ',' << detail::formatReal(e.curvature) << '\n';
    }
    return os.str();
}

inline nlohmann::json options_to_json(const RestoreOptions& o) {
    return {{"c1", o.energy.c1},
            {"c2", o.energy.c2},
            {"c3", o.energy.c3},
            {"alpha", o.energy.alpha},
            {"eps", o.energy.epsilon},
            {"rmin", o.descent.rMin},
            {"rmax", o.descent.rMax},
            {"quad_samples", o.energy.quadSamples},
            {"intensity_scale", o.energy.intensityScale},
            {"iters", o.descent.maxIterations},
            {"step", o.descent.initialStep},
            {"radius_step", o.descent.initialRadiusStep},
            {"decay", o.descent.decay},
            {"fd_h", o.descent.fdStep},
            {"early_stop", o.descent.earlyStopRel},
            {"render_samples", o.renderSamples},
            {"probe_ink_mean", o.probeInkMean}};
}

/// Reads any subset of the keys written by options_to_json over `base`.
inline RestoreOptions options_from_json(const nlohmann::json& j, RestoreOptions base = {}) {
    if (j.is_null()) {
        return base;
    }
    if (!j.is_object()) {
        throwInput("params must be a JSON object");
    }
    auto num = [&](const char* key, double& dst) {
        if (j.contains(key)) {
            if (!j.at(key).is_number()) {
                throwInput(std::string("param ") + key + " must be numeric");
            }
            dst = j.at(key).get<double>();
        }
    };
    auto integer = [&](const char* key, int& dst) {
        if (j.contains(key)) {
            if (!j.at(key).is_number_integer()) {
                throwInput(std::string("param ") + key + " must be an integer");
            }
            dst = j.at(key).get<int>();
        }
    };
    num("c1", base.energy.c1);
    num("c2", base.energy.c2);
    num("c3", base.energy.c3);
    num("alpha", base.energy.alpha);
    num("eps", base.energy.epsilon);
    num("rmin", base.descent.rMin);
    num("rmax", base.descent.rMax);
    integer("quad_samples", base.energy.quadSamples);
    num("intensity_scale", base.energy.intensityScale);
    integer("iters", base.descent.maxIterations);
    num("step", base.descent.initialStep);
    num("radius_step", base.descent.initialRadiusStep);
    num("decay", base.descent.decay);
    num("fd_h", base.descent.fdStep);
    num("early_stop", base.descent.earlyStopRel);
    integer("render_samples", base.renderSamples);
    num("probe_ink_mean", base.probeInkMean);
    base.energy.rMin = base.descent.rMin;
    base.energy.rMax = base.descent.rMax;
    return base;
}

}  // namespace strokeforge

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

// Synthetic ground truth for validating restorations: parametric strokes
// rendered as swept discs, damage operators, and mask scoring.

#include <strokeforge/image.hpp>
#include <strokeforge/restore.hpp>
#include <strokeforge/spline.hpp>
#include <strokeforge/stroke.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace strokeforge {

enum class ShapeKind { Line, Arc, SCurve, Corner };

inline const char* to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Line: return "line";
        case ShapeKind::Arc: return "arc";
        case ShapeKind::SCurve: return "s-curve";
        case ShapeKind::Corner: return "corner";
    }
    return "?";
}

/// Geometry relative to the image: the stroke is centered, `extent` is its
/// size as a fraction of the shorter image side and `angle` rotates it.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Line;
    double extent = 0.6;
    double angle = 0.0;
    int intervals = 8;
};

/// Radius along the stroke, linear from `start` to `end`.
struct RadiusProfile {
    double start = 8.0;
    double end = 8.0;

    double maxRadius() const { return std::max(start, end); }
};

struct SyntheticStroke {
    ShapeSpec shape;
    RadiusProfile radius;
    SplineCurve truth;
    GrayImage clean;
    BinaryMask mask;
};

namespace detail {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Shape centerline at s in [0, 1], centered at the origin, unrotated.
inline Vec2 shapePoint(ShapeKind kind, double size, double s) {
    switch (kind) {
        case ShapeKind::Line:
            return {(s - 0.5) * size, 0.0};
        case ShapeKind::Arc: {
            const double rho = 0.5 * size;
            const double sweep = 2.0 * std::numbers::pi / 3.0;
            const double phi = -0.5 * sweep + s * sweep - 0.5 * std::numbers::pi;
            return {rho * std::cos(phi), rho * std::sin(phi) + 0.75 * rho};
        }
        case ShapeKind::SCurve:
            return {(s - 0.5) * size, 0.18 * size * std::sin(2.0 * std::numbers::pi * s)};
        case ShapeKind::Corner: {
            const double arm = 0.5 * size;
            if (s <= 0.5) {
                return {-0.5 * arm + (s / 0.5) * arm, -0.5 * arm};
            }
            return {0.5 * arm, -0.5 * arm + ((s - 0.5) / 0.5) * arm};
        }
    }
    return {};
}

// Densest sample count per node interval giving <= 0.25 px center spacing.
inline int denseSamples(const SplineCurve& curve) {
    double maxStep = 0.0;
    for (int i = 0; i < curve.lastNode(); ++i) {
        for (int k = 0; k < 8; ++k) {
            const CurvePoint a = eval_curve(curve, i + k / 8.0);
            const CurvePoint b = eval_curve(curve, i + (k + 1) / 8.0);
            maxStep = std::max(maxStep, std::hypot(b.x - a.x, b.y - a.y) * 8.0);
        }
    }
    return std::max(16, static_cast<int>(std::ceil(maxStep * 4.0)));
}

}  // namespace detail

/// Builds the ground-truth curve, clean image and mask. The seed is accepted
/// for interface symmetry with degrade; generation itself is deterministic.
inline SyntheticStroke generate(const ShapeSpec& shape, const RadiusProfile& radius, int width, int height,
                                std::uint64_t /*seed*/ = 0) {
    if (!(shape.extent > 0.0)) {
        throwInput("synthetic stroke has zero length");
    }
    if (shape.intervals < 2) {
        throwInput("synthetic stroke needs at least 2 node intervals");
    }
    if (!(radius.start > 0.0 && radius.end > 0.0)) {
        throwInput("synthetic radius must be positive");
    }
    const double size = shape.extent * std::min(width, height);
    const double cx = 0.5 * (width - 1);
    const double cy = 0.5 * (height - 1);
    const double ca = std::cos(shape.angle);
    const double sa = std::sin(shape.angle);

    const int n = shape.intervals;
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    std::vector<double> ys(xs.size());
    std::vector<double> rs(xs.size());
    const double margin = radius.maxRadius();
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        const detail::Vec2 p = detail::shapePoint(shape.kind, size, s);
        xs[static_cast<std::size_t>(i)] = cx + ca * p.x - sa * p.y;
        ys[static_cast<std::size_t>(i)] = cy + sa * p.x + ca * p.y;
        rs[static_cast<std::size_t>(i)] = radius.start + s * (radius.end - radius.start);
    }
    const auto cxs = interpolate_nodes(xs);
    const auto cys = interpolate_nodes(ys);
    const auto crs = interpolate_nodes(rs);
    std::vector<ControlPoint> cps(cxs.size());
    for (std::size_t k = 0; k < cps.size(); ++k) {
        cps[k] = {cxs[k], cys[k], crs[k]};
    }
    SyntheticStroke out;
    out.shape = shape;
    out.radius = radius;
    out.truth = SplineCurve(std::move(cps));

    const int dense = detail::denseSamples(out.truth);
    for (int k = 0; k <= n * dense; ++k) {
        const CurvePoint c = eval_curve(out.truth, std::min(static_cast<double>(k) / dense, static_cast<double>(n)));
        if (c.x < margin || c.y < margin || c.x > width - 1 - margin ||
            c.y > height - 1 - margin) {
            throwInput("synthetic stroke does not fit the image with its radius margin");
        }
    }
    out.mask = render_stroke(out.truth, dense, {width, height});
    std::vector<double> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 1.0);
    for (int q = 0; q < height; ++q) {
        for (int p = 0; p < width; ++p) {
            if (out.mask.at(p, q)) {
                px[static_cast<std::size_t>(q) * static_cast<std::size_t>(width) + static_cast<std::size_t>(p)] = 0.0;
            }
        }
    }
    out.clean = GrayImage(width, height, std::move(px));
    return out;
}

/// Truth curve value at a fraction s in [0, 1] of its parameter range.
inline CurvePoint truth_at(const SyntheticStroke& s, double fraction) {
    const double n = s.truth.lastNode();
    return eval_curve(s.truth, std::clamp(fraction, 0.0, 1.0) * n);
}

struct DegradeParams {
    /// Contiguous fraction of the stroke parameter range set to background.
    double eraseFrac = 0.2;
    /// Center of the erased range as a fraction of the parameter range.
    double eraseCenter = 0.5;
    double noiseSigma = 0.05;
    int blotches = 3;
    double blotchRMin = 4.0;
    double blotchRMax = 10.0;
};

/// Erases part of the stroke, stamps dark blotches, adds clipped Gaussian
/// noise. Pixels are assigned to the stroke parameter of the nearest dense
/// centerline sample.
inline GrayImage degrade(const SyntheticStroke& s, const DegradeParams& params, std::uint64_t seed) {
    if (!(params.eraseFrac >= 0.0 && params.eraseFrac < 1.0)) {
        throwInput("erase fraction must lie in [0, 1)");
    }
    if (!(params.noiseSigma >= 0.0) || params.blotches < 0) {
        throwInput("noise sigma and blotch count must be nonnegative");
    }
    GrayImage img = s.clean;
    const int w = img.width();
    const int h = img.height();

    if (params.eraseFrac > 0.0) {
        const double n = s.truth.lastNode();
        const double lo = (params.eraseCenter - 0.5 * params.eraseFrac) * n;
        const double hi = (params.eraseCenter + 0.5 * params.eraseFrac) * n;
        const int dense = detail::denseSamples(s.truth);
        std::vector<CurvePoint> centers;
        std::vector<double> ts;
        for (int k = 0; k <= s.truth.lastNode() * dense; ++k) {
            const double t = std::min(static_cast<double>(k) / dense, n);
            centers.push_back(eval_curve(s.truth, t));
            ts.push_back(t);
        }
        for (int q = 0; q < h; ++q) {
            for (int p = 0; p < w; ++p) {
                if (!s.mask.at(p, q)) {
                    continue;
                }
                double best = std::numeric_limits<double>::infinity();
                double bestT = 0.0;
                for (std::size_t k = 0; k < centers.size(); ++k) {
                    const double d = std::hypot(p - centers[k].x, q - centers[k].y);
                    if (d < best) {
                        best = d;
                        bestT = ts[k];
                    }
                }
                if (bestT >= lo && bestT <= hi) {
                    img.set(p, q, 1.0);
                }
            }
        }
    }

    std::mt19937_64 rng(seed);
    if (params.blotches > 0) {
        std::uniform_real_distribution<double> ux(0.0, w - 1.0);
        std::uniform_real_distribution<double> uy(0.0, h - 1.0);
        std::uniform_real_distribution<double> ur(params.blotchRMin, params.blotchRMax);
        std::uniform_real_distribution<double> ug(0.0, 0.35);
        for (int b = 0; b < params.blotches; ++b) {
            const Disc d{ux(rng), uy(rng), ur(rng)};
            const double gray = ug(rng);
            for_each_disc_pixel(d, [&](int p, int q) {
                if (img.contains(p, q)) {
                    img.set(p, q, std::min(img.at(p, q), gray));
                }
            });
        }
    }
    if (params.noiseSigma > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noiseSigma);
        for (int q = 0; q < h; ++q) {
            for (int p = 0; p < w; ++p) {
                img.set(p, q, std::clamp(img.at(p, q) + noise(rng), 0.0, 1.0));
            }
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Scoring

/// Zhang-Suen thinning to a one-pixel-wide skeleton.
inline BinaryMask skeletonize(const BinaryMask& mask) {
    BinaryMask img = mask;
    const int w = img.width();
    const int h = img.height();
    auto px = [&](int p, int q) { return img.contains(p, q) && img.at(p, q) ? 1 : 0; };
    bool changed = true;
    std::vector<std::pair<int, int>> doomed;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            doomed.clear();
            for (int q = 0; q < h; ++q) {
                for (int p = 0; p < w; ++p) {
                    if (!img.at(p, q)) {
                        continue;
                    }
                    // Neighbors P2..P9 clockwise from north.
                    const int nb[8] = {px(p, q - 1), px(p + 1, q - 1), px(p + 1, q), px(p + 1, q + 1),
                                       px(p, q + 1), px(p - 1, q + 1), px(p - 1, q), px(p - 1, q - 1)};
                    int count = 0;
                    int transitions = 0;
                    for (int k = 0; k < 8; ++k) {
                        count += nb[k];
                        if (nb[k] == 0 && nb[(k + 1) % 8] == 1) {
                            ++transitions;
                        }
                    }
                    if (count < 2 || count > 6 || transitions != 1) {
                        continue;
                    }
                    const bool keep = pass == 0 ? (nb[0] * nb[2] * nb[4] != 0 || nb[2] * nb[4] * nb[6] != 0)
                                                : (nb[0] * nb[2] * nb[6] != 0 || nb[0] * nb[4] * nb[6] != 0);
                    if (!keep) {
                        doomed.emplace_back(p, q);
                    }
                }
            }
            for (const auto& [p, q] : doomed) {
                img.set(p, q, false);
            }
            changed = changed || !doomed.empty();
        }
    }
    return img;
}

/// Symmetric Hausdorff distance between the foreground pixel sets. Zero when
/// both are empty, infinity when exactly one is.
inline double hausdorff(const BinaryMask& a, const BinaryMask& b) {
    std::vector<std::pair<int, int>> pa;
    std::vector<std::pair<int, int>> pb;
    for (int q = 0; q < a.height(); ++q) {
        for (int p = 0; p < a.width(); ++p) {
            if (a.at(p, q)) pa.emplace_back(p, q);
            if (b.at(p, q)) pb.emplace_back(p, q);
        }
    }
    if (pa.empty() && pb.empty()) {
        return 0.0;
    }
    if (pa.empty() || pb.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    auto directed = [](const auto& from, const auto& to) {
        long worst = 0;
        for (const auto& [p, q] : from) {
            long best = std::numeric_limits<long>::max();
            for (const auto& [u, v] : to) {
                const long dx = p - u;
                const long dy = q - v;
                best = std::min(best, dx * dx + dy * dy);
                if (best == 0) break;
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(static_cast<double>(std::max(directed(pa, pb), directed(pb, pa))));
}

struct Score {
    double iou = 0.0;
    double hausdorff = 0.0;
};

inline double iou(const BinaryMask& a, const BinaryMask& b) {
    if (!a.sameShape(b)) {
        throwInput("score: mask dimensions differ");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (int q = 0; q < a.height(); ++q) {
        for (int p = 0; p < a.width(); ++p) {
            const bool x = a.at(p, q);
            const bool y = b.at(p, q);
            inter += (x && y) ? 1 : 0;
            uni += (x || y) ? 1 : 0;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline Score score(const BinaryMask& result, const BinaryMask& truth) {
    Score s;
    s.iou = iou(result, truth);
    s.hausdorff = hausdorff(skeletonize(result), skeletonize(truth));
    return s;
}

// ---------------------------------------------------------------------------
// Benchmark cases

struct BenchCase {
    std::string name;
    ShapeSpec shape;
    RadiusProfile radius;
    int width = 256;
    int height = 256;
    DegradeParams damage;
    std::uint64_t seed = 1;
    /// Sample positions as fractions of the truth parameter range.
    std::vector<double> samples;
};

struct BenchOutcome {
    BenchCase spec;
    RestorationResult result;
    Score score;
};

/// Sample points for a case, taken from the truth centerline.
inline SamplePointSet bench_points(const SyntheticStroke& s, const std::vector<double>& fractions) {
    SamplePointSet pts;
    for (std::size_t k = 0; k < fractions.size(); ++k) {
        const CurvePoint c = truth_at(s, fractions[k]);
        SamplePoint sp;
        sp.x = c.x;
        sp.y = c.y;
        sp.kind = (k == 0 || k + 1 == fractions.size()) ? PointKind::Endpoint : PointKind::CurvatureExtremum;
        pts.push_back(sp);
    }
    return pts;
}

inline BenchOutcome run_case(const BenchCase& c, const RestoreOptions& options, double stretchLo = 1.0,
                             double stretchHi = 99.0) {
    const SyntheticStroke s = generate(c.shape, c.radius, c.width, c.height, c.seed);
    const GrayImage damaged = degrade(s, c.damage, c.seed);
    const GrayImage stretched = histogram_stretch(damaged, stretchLo, stretchHi);
    BenchOutcome out;
    out.spec = c;
    out.result = restore(stretched, bench_points(s, c.samples), options);
    out.score = score(out.result.mask, s.mask);
    return out;
}

/// The shipped benchmark: every shape, clean and damaged, fixed seeds.
inline std::vector<BenchCase> default_suite() {
    std::vector<BenchCase> cases;
    auto add = [&](std::string name, ShapeSpec shape, RadiusProfile radius, DegradeParams damage, std::uint64_t seed,
                   std::vector<double> samples) {
        BenchCase c;
        c.name = std::move(name);
        c.shape = shape;
        c.radius = radius;
        c.damage = damage;
        c.seed = seed;
        c.samples = std::move(samples);
        cases.push_back(std::move(c));
    };
    const DegradeParams clean{0.0, 0.5, 0.0, 0, 4.0, 10.0};
    add("line-clean", {ShapeKind::Line, 0.6, 0.3, 8}, {8.0, 8.0}, clean, 1, {0.0, 1.0});
    add("scurve-gap", {ShapeKind::SCurve, 0.6, 0.0, 8}, {8.0, 8.0}, {0.2, 0.5, 0.05, 0, 4.0, 10.0}, 1,
        {0.0, 0.25, 0.4, 0.6, 1.0});
    add("arc-blotched", {ShapeKind::Arc, 0.6, 0.0, 8}, {6.0, 6.0}, {0.0, 0.5, 0.05, 3, 4.0, 10.0}, 2,
        {0.0, 0.5, 1.0});
    add("corner-noisy", {ShapeKind::Corner, 0.6, 0.0, 8}, {7.0, 7.0}, {0.0, 0.5, 0.05, 0, 4.0, 10.0}, 3,
        {0.0, 0.5, 1.0});
    add("taper-gap", {ShapeKind::Line, 0.6, -0.5, 8}, {10.0, 5.0}, {0.15, 0.3, 0.05, 2, 4.0, 10.0}, 4,
        {0.0, 0.2, 0.4, 1.0});
    return cases;
}

inline std::string degradation_label(const DegradeParams& d) {
    std::ostringstream os;
    os << "erase=" << d.eraseFrac << "@" << d.eraseCenter << ";sigma=" << d.noiseSigma << ";blotches=" << d.blotches;
    return os.str();
}

/// One row per case: case,shape,degradation,iou,hausdorff.
inline std::string bench_to_csv(const std::vector<BenchOutcome>& outcomes) {
    std::ostringstream os;
    os << "case,shape,degradation,iou,hausdorff\n";
    for (const auto& o : outcomes) {
        os << o.spec.name << ',' << to_string(o.spec.shape.kind) << ',' << degradation_label(o.spec.damage) << ','
           << detail::formatReal(o.score.iou) << ',' << detail::formatReal(o.score.hausdorff) << '\n';
    }
    return os.str();
}

struct SuiteRun {
    std::vector<BenchOutcome> outcomes;
    std::vector<double> seconds;
};

/// Runs the cases concurrently; outcomes keep the case order.
inline SuiteRun run_suite(const std::vector<BenchCase>& cases, RestoreOptions options, int threads = 0) {
    options.descent.threads = 1;
    SuiteRun run;
    run.outcomes.resize(cases.size());
    run.seconds.assign(cases.size(), 0.0);
    detail::parallelFor(cases.size(), threads, [&](std::size_t k) {
        const auto t0 = std::chrono::steady_clock::now();
        run.outcomes[k] = run_case(cases[k], options);
        run.seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return run;
}

/// Writes the scores CSV at `scores` and, per case, <artifacts>/<case>/
/// {input.png, truth.png, mask.png, points.json, spline.json, trace.csv}.
/// Wall-clock times go to `timing` only, so the other files are
/// reproducible byte for byte.
inline void write_suite(const SuiteRun& run, const std::filesystem::path& scores,
                        const std::filesystem::path& artifacts, const std::filesystem::path& timing) {
    auto text = [](const std::filesystem::path& path, const std::string& s) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        write_file(path.string(), std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    };
    text(scores, bench_to_csv(run.outcomes));
    std::ostringstream times;
    times << "case,runtime_s\n";
    for (std::size_t k = 0; k < run.outcomes.size(); ++k) {
        const BenchOutcome& o = run.outcomes[k];
        const BenchCase& c = o.spec;
        const std::filesystem::path dir = artifacts / c.name;
        std::filesystem::create_directories(dir);
        const SyntheticStroke s = generate(c.shape, c.radius, c.width, c.height, c.seed);
        save_gray(degrade(s, c.damage, c.seed), (dir / "input.png").string());
        save_mask(s.mask, (dir / "truth.png").string());
        save_mask(o.result.mask, (dir / "mask.png").string());
        text(dir / "points.json", points_to_json(bench_points(s, c.samples)).dump(2) + "\n");
        text(dir / "spline.json", spline_to_json(o.result.curve));
        text(dir / "trace.csv", trace_to_csv(o.result.trace));
        times << c.name << ',' << run.seconds[k] << '\n';
    }
    text(timing, times.str());
}

}  // namespace strokeforge

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

// The swept-disc stroke model. A stroke is the union over t of the pen discs
//
//     S(t) = { (p, q) : (p - x(t))^2 + (q - y(t))^2 <= r(t)^2 }
//
// sampled on integer pixel centers. Pixel (p, q) is column p, row q.

#include <strokeforge/image.hpp>
#include <strokeforge/spline.hpp>

#include <cmath>
#include <vector>

namespace strokeforge {

struct Disc {
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
};

/// Discs below this radius hold no pixels for gray-mass and rendering.
inline constexpr double kRadiusFloor = 0.25;

struct ImageBounds {
    int width = 0;
    int height = 0;

    bool contains(int p, int q) const { return p >= 0 && q >= 0 && p < width && q < height; }
};

template <class Raster>
ImageBounds bounds_of(const Raster& img) {
    return {img.width(), img.height()};
}

struct DiscPixel {
    int p = 0;
    int q = 0;
    bool inBounds = false;
};

inline bool in_disc(const Disc& d, int p, int q) {
    const double dx = static_cast<double>(p) - d.x;
    const double dy = static_cast<double>(q) - d.y;
    return dx * dx + dy * dy <= d.r * d.r;
}

/// Calls `visit(p, q)` for every integer pixel center inside the disc, row by
/// row. Span ends come from a square root and are then nudged so that the
/// exact membership test decides every boundary pixel.
template <class Visit>
void for_each_disc_pixel(const Disc& d, Visit&& visit) {
    if (!(d.r >= 0.0)) {
        return;
    }
    const int qLo = static_cast<int>(std::ceil(d.y - d.r));
    const int qHi = static_cast<int>(std::floor(d.y + d.r));
    for (int q = qLo; q <= qHi; ++q) {
        const double dy = static_cast<double>(q) - d.y;
        const double rem = d.r * d.r - dy * dy;
        if (rem < 0.0) {
            continue;
        }
        const double half = std::sqrt(rem);
        int pLo = static_cast<int>(std::ceil(d.x - half));
        int pHi = static_cast<int>(std::floor(d.x + half));
        while (in_disc(d, pLo - 1, q)) {
            --pLo;
        }
        while (pLo <= pHi && !in_disc(d, pLo, q)) {
            ++pLo;
        }
        while (in_disc(d, pHi + 1, q)) {
            ++pHi;
        }
        while (pHi >= pLo && !in_disc(d, pHi, q)) {
            --pHi;
        }
        for (int p = pLo; p <= pHi; ++p) {
            visit(p, q);
        }
    }
}

/// Every pixel center inside the disc, tagged with whether it lies in bounds.
inline std::vector<DiscPixel> disc_pixels(const Disc& d, ImageBounds bounds) {
    std::vector<DiscPixel> out;
    for_each_disc_pixel(d, [&](int p, int q) { out.push_back({p, q, bounds.contains(p, q)}); });
    return out;
}

/// G_I: sum of gray values inside the disc. Pixels outside the image count
/// as background (1).
inline double gray_mass(const GrayImage& img, const Disc& d) {
    if (d.r < kRadiusFloor) {
        return 0.0;
    }
    double sum = 0.0;
    const int w = img.width();
    const int h = img.height();
    const auto px = img.pixels();
    for_each_disc_pixel(d, [&](int p, int q) {
        if (p >= 0 && q >= 0 && p < w && q < h) {
            sum += px[static_cast<std::size_t>(q) * static_cast<std::size_t>(w) + static_cast<std::size_t>(p)];
        } else {
            sum += 1.0;
        }
    });
    return sum;
}

inline void stamp_disc(BinaryMask& mask, const Disc& d) {
    if (d.r < kRadiusFloor) {
        return;
    }
    for_each_disc_pixel(d, [&](int p, int q) {
        if (mask.contains(p, q)) {
            mask.set(p, q);
        }
    });
}

inline constexpr int kDefaultRenderSamples = 16;

/// Union of the pen discs at samplesPerInterval uniformly spaced parameters per
/// node interval, endpoints included.
inline BinaryMask render_stroke(const SplineCurve& curve, int samplesPerInterval, ImageBounds bounds) {
    if (samplesPerInterval < 1) {
        throwInput("render_stroke needs samples_per_interval >= 1");
    }
    BinaryMask mask(bounds.width, bounds.height);
    const int total = curve.lastNode() * samplesPerInterval;
    for (int k = 0; k <= total; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(samplesPerInterval);
        const CurvePoint c = eval_curve(curve, std::min(t, static_cast<double>(curve.lastNode())));
        stamp_disc(mask, {c.x, c.y, c.r});
    }
    return mask;
}

}  // namespace strokeforge

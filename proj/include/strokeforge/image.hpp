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

// Grayscale rasters in the ink-dark convention (0 = ink, 1 = background),
// binary stroke masks, and the 8-bit PNG / PGM codecs around them.

#include <strokeforge/error.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <png.h>

namespace strokeforge {

class GrayImage {
public:
    GrayImage() = default;

    GrayImage(int width, int height, double fill = 1.0)
        : width_(width), height_(height),
          pixels_(checkedArea(width, height), std::clamp(fill, 0.0, 1.0)) {}

    GrayImage(int width, int height, std::vector<double> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (pixels_.size() != checkedArea(width, height)) {
            throwInput("pixel count does not match image dimensions");
        }
        for (double& v : pixels_) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throwInput("gray values must lie in [0, 1]");
            }
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    bool contains(int p, int q) const { return p >= 0 && q >= 0 && p < width_ && q < height_; }

    /// Column p, row q.
    double at(int p, int q) const { return pixels_[index(p, q)]; }

    void set(int p, int q, double v) { pixels_[index(p, q)] = std::clamp(v, 0.0, 1.0); }

    std::span<const double> pixels() const { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    static std::size_t checkedArea(int width, int height) {
        if (width <= 0 || height <= 0) {
            throwInput("image dimensions must be positive");
        }
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int p, int q) const {
        return static_cast<std::size_t>(q) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(p);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), 0) {
        if (width <= 0 || height <= 0) {
            throwInput("mask dimensions must be positive");
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool contains(int p, int q) const { return p >= 0 && q >= 0 && p < width_ && q < height_; }
    bool at(int p, int q) const { return bits_[index(p, q)] != 0; }
    void set(int p, int q, bool v = true) { bits_[index(p, q)] = v ? 1 : 0; }

    std::size_t count() const {
        return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
    }

    bool sameShape(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// Pixelwise OR with a mask of the same shape.
    BinaryMask& operator|=(const BinaryMask& other) {
        if (!sameShape(other)) {
            throwInput("mask dimensions differ: " + std::to_string(width_) + "x" + std::to_string(height_) +
                       " vs " + std::to_string(other.width_) + "x" + std::to_string(other.height_));
        }
        for (std::size_t k = 0; k < bits_.size(); ++k) {
            bits_[k] |= other.bits_[k];
        }
        return *this;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int p, int q) const {
        return static_cast<std::size_t>(q) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(p);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Codecs

using Bytes = std::vector<std::uint8_t>;

namespace detail {

inline bool isPng(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool isPgm(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

// 8-bit samples, row-major. Uses the libpng simplified API, which reports
// failures through return codes.
inline void decodePng(std::span<const std::uint8_t> bytes, int& width, int& height, std::vector<std::uint8_t>& samples) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        const std::string msg = image.message;
        png_image_free(&image);
        throwInput("PNG: " + msg);
    }
    if ((image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) != 0) {
        png_image_free(&image);
        throwInput("PNG is not single-channel grayscale");
    }
    image.format = PNG_FORMAT_GRAY;
    width = static_cast<int>(image.width);
    height = static_cast<int>(image.height);
    samples.assign(PNG_IMAGE_SIZE(image), 0);
    if (!png_image_finish_read(&image, nullptr, samples.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throwInput("PNG: " + msg);
    }
}

inline Bytes encodePng(int width, int height, std::span<const std::uint8_t> samples) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, samples.data(), 0, nullptr)) {
        throwInput(std::string("PNG: ") + image.message);
    }
    Bytes out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, samples.data(), 0, nullptr)) {
        throwInput(std::string("PNG: ") + image.message);
    }
    out.resize(size);
    return out;
}

inline void decodePgm(std::span<const std::uint8_t> bytes, int& width, int& height, std::vector<std::uint8_t>& samples) {
    std::size_t pos = 2;
    auto skipSpaceAndComments = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto readInt = [&]() -> long {
        skipSpaceAndComments();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
            throwInput("PGM: malformed header");
        }
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1'000'000) {
                throwInput("PGM: header value too large");
            }
            ++pos;
        }
        return v;
    };
    const long w = readInt();
    const long h = readInt();
    const long maxval = readInt();
    if (w <= 0 || h <= 0) {
        throwInput("PGM: nonpositive dimensions");
    }
    if (maxval <= 0 || maxval > 255) {
        throwInput("PGM: only 8-bit maxval (1..255) is supported");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throwInput("PGM: malformed header");
    }
    ++pos;  // single whitespace before the raster
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() - pos < count) {
        throwInput("PGM: truncated raster");
    }
    width = static_cast<int>(w);
    height = static_cast<int>(h);
    samples.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
    if (maxval != 255) {
        for (auto& s : samples) {
            s = static_cast<std::uint8_t>(std::lround(std::min<long>(s, maxval) * 255.0 / static_cast<double>(maxval)));
        }
    }
}

}  // namespace detail

inline Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throwInput("cannot open " + path);
    }
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throwInput("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throwInput("write failed: " + path);
    }
}

/// Decodes an 8-bit grayscale PNG or binary PGM (P5) into [0, 1].
inline GrayImage load_gray(std::span<const std::uint8_t> bytes, bool invert = false) {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples;
    if (detail::isPng(bytes)) {
        detail::decodePng(bytes, width, height, samples);
    } else if (detail::isPgm(bytes)) {
        detail::decodePgm(bytes, width, height, samples);
    } else {
        throwInput("unsupported image format (expected grayscale PNG or binary PGM)");
    }
    std::vector<double> pixels(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double v = samples[k] / 255.0;
        pixels[k] = invert ? 1.0 - v : v;
    }
    return GrayImage(width, height, std::move(pixels));
}

inline GrayImage load_gray(const std::string& path, bool invert = false) {
    const Bytes bytes = read_file(path);
    return load_gray(std::span<const std::uint8_t>(bytes), invert);
}

inline Bytes encode_gray_png(const GrayImage& img) {
    std::vector<std::uint8_t> samples(img.pixels().size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        samples[k] = static_cast<std::uint8_t>(std::lround(img.pixels()[k] * 255.0));
    }
    return detail::encodePng(img.width(), img.height(), samples);
}

inline Bytes encode_pgm(const GrayImage& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    Bytes out(header.begin(), header.end());
    for (double v : img.pixels()) {
        out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
    return out;
}

inline void save_gray(const GrayImage& img, const std::string& path) {
    write_file(path, encode_gray_png(img));
}

/// Foreground black (0) on white (255).
inline Bytes encode_mask_png(const BinaryMask& mask) {
    std::vector<std::uint8_t> samples(static_cast<std::size_t>(mask.width()) * static_cast<std::size_t>(mask.height()));
    for (int q = 0; q < mask.height(); ++q) {
        for (int p = 0; p < mask.width(); ++p) {
            samples[static_cast<std::size_t>(q) * static_cast<std::size_t>(mask.width()) + static_cast<std::size_t>(p)] =
                mask.at(p, q) ? 0 : 255;
        }
    }
    return detail::encodePng(mask.width(), mask.height(), samples);
}

inline void save_mask(const BinaryMask& mask, const std::string& path) {
    write_file(path, encode_mask_png(mask));
}

/// Reads a mask written by save_mask: dark pixels (< 0.5) are foreground.
inline BinaryMask load_mask(std::span<const std::uint8_t> bytes) {
    const GrayImage img = load_gray(bytes);
    BinaryMask mask(img.width(), img.height());
    for (int q = 0; q < img.height(); ++q) {
        for (int p = 0; p < img.width(); ++p) {
            mask.set(p, q, img.at(p, q) < 0.5);
        }
    }
    return mask;
}

inline BinaryMask load_mask(const std::string& path) {
    const Bytes bytes = read_file(path);
    return load_mask(std::span<const std::uint8_t>(bytes));
}

// ---------------------------------------------------------------------------
// Contrast

/// Percentile with linear interpolation between order statistics.
inline double percentile(std::vector<double> values, double pct) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

/// Linear stretch mapping the lo / hi percentiles to 0 / 1, clamped.
/// When both percentiles coincide every pixel becomes 0.5.
inline GrayImage histogram_stretch(const GrayImage& img, double loPct = 1.0, double hiPct = 99.0) {
    if (!(loPct >= 0.0 && loPct < hiPct && hiPct <= 100.0)) {
        throwInput("histogram stretch needs 0 <= lo < hi <= 100");
    }
    std::vector<double> values(img.pixels().begin(), img.pixels().end());
    const double lo = percentile(values, loPct);
    const double hi = percentile(values, hiPct);
    std::vector<double> out(values.size());
    if (!(hi > lo)) {
        std::fill(out.begin(), out.end(), 0.5);
    } else {
        const double scale = 1.0 / (hi - lo);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = std::clamp((img.pixels()[k] - lo) * scale, 0.0, 1.0);
        }
    }
    return GrayImage(img.width(), img.height(), std::move(out));
}

}  // namespace strokeforge

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

#include "oracles.hpp"

#include <strokeforge/synth.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using namespace strokeforge;

namespace {

constexpr DegradeParams kNoDamage{0.0, 0.5, 0.0, 0, 4.0, 10.0};

std::size_t inkCount(const GrayImage& img) {
    std::size_t n = 0;
    for (double v : img.pixels()) n += v < 0.5;
    return n;
}

BinaryMask rowBand(int w, int h, int q0, int q1) {
    BinaryMask m(w, h);
    for (int q = q0; q <= q1; ++q)
        for (int p = 0; p < w; ++p) m.set(p, q);
    return m;
}

std::string slurp(const std::filesystem::path& p) {
    const Bytes b = read_file(p.string());
    return {b.begin(), b.end()};
}

}  // namespace

TEST(Generate, LineMaskMatchesDistanceOracle) {
    const auto s = generate({ShapeKind::Line, 0.6, 0.0, 8}, {8.0, 8.0}, 256, 256);
    const CurvePoint a = truth_at(s, 0.0);
    const CurvePoint b = truth_at(s, 1.0);
    int disagreements = 0;
    for (int q = 0; q < 256; ++q) {
        for (int p = 0; p < 256; ++p) {
            const double d = oracle::distToSegment(p, q, a.x, a.y, b.x, b.y);
            if ((d <= 8.0) != s.mask.at(p, q)) {
                ++disagreements;
                EXPECT_LT(std::abs(d - 8.0), 0.5) << p << "," << q;
            }
        }
    }
    EXPECT_LT(disagreements, 10);
}

TEST(Generate, CleanImageIsComplementOfMask) {
    const auto s = generate({ShapeKind::SCurve, 0.6, 0.2, 8}, {6.0, 9.0}, 200, 180);
    for (int q = 0; q < 180; ++q)
        for (int p = 0; p < 200; ++p) EXPECT_EQ(s.clean.at(p, q), s.mask.at(p, q) ? 0.0 : 1.0);
}

TEST(Generate, TaperFollowsRadiusProfile) {
    const auto s = generate({ShapeKind::Line, 0.6, 0.0, 8}, {10.0, 5.0}, 256, 256);
    EXPECT_NEAR(truth_at(s, 0.0).r, 10.0, 1e-9);
    EXPECT_NEAR(truth_at(s, 0.5).r, 7.5, 1e-9);
    EXPECT_NEAR(truth_at(s, 1.0).r, 5.0, 1e-9);
}

TEST(Generate, RejectsDegenerateSpecs) {
    EXPECT_THROW(generate({ShapeKind::Line, 0.0, 0.0, 8}, {8.0, 8.0}, 256, 256), Error);
    EXPECT_THROW(generate({ShapeKind::Line, 0.6, 0.0, 1}, {8.0, 8.0}, 256, 256), Error);
    EXPECT_THROW(generate({ShapeKind::Line, 0.6, 0.0, 8}, {0.0, 8.0}, 256, 256), Error);
    EXPECT_THROW(generate({ShapeKind::Line, 0.98, 0.0, 8}, {8.0, 8.0}, 256, 256), Error);
}

TEST(Generate, SeedDoesNotAffectGeneration) {
    for (ShapeKind k : {ShapeKind::Line, ShapeKind::Arc, ShapeKind::SCurve, ShapeKind::Corner}) {
        const auto a = generate({k, 0.6, 0.1, 8}, {7.0, 7.0}, 200, 200, 1);
        const auto b = generate({k, 0.6, 0.1, 8}, {7.0, 7.0}, 200, 200, 99);
        EXPECT_EQ(a.mask, b.mask) << to_string(k);
        EXPECT_EQ(a.clean, b.clean);
        EXPECT_EQ(a.truth.controlPoints(), b.truth.controlPoints());
    }
}

// ---------------------------------------------------------------------------

TEST(Degrade, ZeroParametersAreIdentity) {
    const auto s = generate({ShapeKind::Arc, 0.6, 0.0, 8}, {6.0, 6.0}, 200, 200);
    EXPECT_EQ(degrade(s, kNoDamage, 5), s.clean);
}

TEST(Degrade, EraseFractionRemovesThatShareOfInk) {
    const auto s = generate({ShapeKind::Line, 0.6, 0.0, 8}, {8.0, 8.0}, 256, 256);
    DegradeParams d = kNoDamage;
    d.eraseFrac = 0.2;
    const double before = static_cast<double>(inkCount(s.clean));
    const double after = static_cast<double>(inkCount(degrade(s, d, 1)));
    EXPECT_NEAR((before - after) / before, 0.20, 0.03);
}

TEST(Degrade, NoiseIsClippedAndRarelyLarge) {
    const auto s = generate({ShapeKind::Line, 0.6, 0.0, 8}, {8.0, 8.0}, 1000, 1000);
    DegradeParams d = kNoDamage;
    d.noiseSigma = 0.1;
    const GrayImage out = degrade(s, d, 11);
    std::size_t big = 0;
    double meanShift = 0.0;
    const auto a = s.clean.pixels();
    const auto b = out.pixels();
    ASSERT_EQ(a.size(), 1000000u);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_GE(b[k], 0.0);
        EXPECT_LE(b[k], 1.0);
        big += std::abs(b[k] - a[k]) > 0.5;
        meanShift += std::abs(b[k] - a[k]);
    }
    EXPECT_LE(big, a.size() / 1000);
    // Half-normal mean on one side of each clipped pixel: sigma / sqrt(2 pi).
    EXPECT_NEAR(meanShift / a.size(), 0.1 / std::sqrt(2.0 * std::numbers::pi), 0.003);
}

TEST(Degrade, BlotchesOnlyDarken) {
    const auto s = generate({ShapeKind::Corner, 0.6, 0.0, 8}, {7.0, 7.0}, 200, 200);
    DegradeParams d = kNoDamage;
    d.blotches = 5;
    const GrayImage out = degrade(s, d, 3);
    std::size_t darker = 0;
    for (int q = 0; q < 200; ++q) {
        for (int p = 0; p < 200; ++p) {
            EXPECT_LE(out.at(p, q), s.clean.at(p, q));
            darker += out.at(p, q) < s.clean.at(p, q);
        }
    }
    EXPECT_GT(darker, 0u);
}

TEST(Degrade, DeterministicPerSeed) {
    const auto s = generate({ShapeKind::SCurve, 0.6, 0.0, 8}, {8.0, 8.0}, 200, 200);
    const DegradeParams d;
    EXPECT_EQ(degrade(s, d, 7), degrade(s, d, 7));
    EXPECT_NE(degrade(s, d, 7), degrade(s, d, 8));
}

TEST(Degrade, RejectsBadParameters) {
    const auto s = generate({ShapeKind::Line, 0.6, 0.0, 8}, {8.0, 8.0}, 128, 128);
    DegradeParams d = kNoDamage;
    d.eraseFrac = 1.0;
    EXPECT_THROW(degrade(s, d, 1), Error);
    d = kNoDamage;
    d.noiseSigma = -0.1;
    EXPECT_THROW(degrade(s, d, 1), Error);
}

// ---------------------------------------------------------------------------

TEST(Score, IdenticalMasks) {
    const auto s = generate({ShapeKind::Arc, 0.6, 0.0, 8}, {6.0, 6.0}, 160, 160);
    const Score sc = score(s.mask, s.mask);
    EXPECT_EQ(sc.iou, 1.0);
    EXPECT_EQ(sc.hausdorff, 0.0);
}

TEST(Score, DisjointMasks) {
    EXPECT_EQ(score(rowBand(50, 50, 2, 8), rowBand(50, 50, 30, 40)).iou, 0.0);
    EXPECT_EQ(iou(BinaryMask(5, 5), BinaryMask(5, 5)), 0.0);
}

TEST(Score, ShiftedBand) {
    const auto a = rowBand(120, 100, 40, 55);
    const auto b = rowBand(120, 100, 42, 57);
    const Score sc = score(a, b);
    EXPECT_NEAR(sc.iou, (16.0 - 2.0) / (16.0 + 2.0), 0.02);
    EXPECT_NEAR(sc.hausdorff, 2.0, 1.0);
}

TEST(Score, IsSymmetric) {
    std::mt19937_64 rng(4);
    std::bernoulli_distribution coin(0.2);
    for (int t = 0; t < 5; ++t) {
        BinaryMask a(40, 30);
        BinaryMask b(40, 30);
        for (int q = 0; q < 30; ++q) {
            for (int p = 0; p < 40; ++p) {
                a.set(p, q, coin(rng));
                b.set(p, q, coin(rng));
            }
        }
        const Score ab = score(a, b);
        const Score ba = score(b, a);
        EXPECT_EQ(ab.iou, ba.iou);
        EXPECT_EQ(ab.hausdorff, ba.hausdorff);
    }
}

TEST(Score, RejectsShapeMismatch) {
    EXPECT_THROW(score(BinaryMask(4, 4), BinaryMask(4, 5)), Error);
}

TEST(Skeleton, BandThinsToCenterLine) {
    const auto sk = skeletonize(rowBand(60, 40, 15, 21));
    for (int p = 5; p < 55; ++p) {
        int hits = 0;
        for (int q = 0; q < 40; ++q) hits += sk.at(p, q);
        EXPECT_EQ(hits, 1) << p;
        EXPECT_TRUE(sk.at(p, 18)) << p;
    }
}

// ---------------------------------------------------------------------------

TEST(Suite, CasesAreWellFormed) {
    const auto cases = default_suite();
    EXPECT_EQ(cases.size(), 5u);
    for (const auto& c : cases) {
        EXPECT_GE(c.samples.size(), 2u);
        EXPECT_NO_THROW(generate(c.shape, c.radius, c.width, c.height, c.seed));
    }
}

TEST(Suite, ScoresAreDeterministicAcrossThreadCounts) {
    const auto cases = default_suite();
    const auto a = run_suite(cases, {}, 1);
    const auto b = run_suite(cases, {}, 4);
    EXPECT_EQ(bench_to_csv(a.outcomes), bench_to_csv(b.outcomes));
    for (const auto& o : a.outcomes) {
        EXPECT_GT(o.score.iou, 0.8) << o.spec.name;
    }
}

TEST(Suite, CsvLayout) {
    const auto run = run_suite({default_suite().front()}, {}, 1);
    const auto csv = bench_to_csv(run.outcomes);
    EXPECT_EQ(csv.rfind("case,shape,degradation,iou,hausdorff\nline-clean,line,erase=0@0.5;sigma=0;blotches=0,", 0),
              0u);
}

TEST(Suite, WrittenArtifactsAreReproducible) {
    const auto root = std::filesystem::temp_directory_path() / "strokeforge_suite_test";
    std::filesystem::remove_all(root);
    const auto cases = default_suite();
    for (const char* tag : {"a", "b"}) {
        const auto run = run_suite(cases, {}, 2);
        write_suite(run, root / tag / "scores.csv", root / tag / "cases", root / tag / "timing.csv");
    }
    EXPECT_EQ(slurp(root / "a" / "scores.csv"), slurp(root / "b" / "scores.csv"));
    for (const auto& c : cases) {
        for (const char* f : {"input.png", "truth.png", "mask.png", "points.json", "spline.json", "trace.csv"}) {
            const auto pa = root / "a" / "cases" / c.name / f;
            ASSERT_TRUE(std::filesystem::exists(pa)) << pa;
            EXPECT_EQ(slurp(pa), slurp(root / "b" / "cases" / c.name / f)) << c.name << "/" << f;
        }
    }
    const auto timing = slurp(root / "a" / "timing.csv");
    EXPECT_EQ(timing.rfind("case,runtime_s\n", 0), 0u);
    std::filesystem::remove_all(root);
}

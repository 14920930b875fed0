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

#include <strokeforge/spline.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace strokeforge;

namespace {

double relErr(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST(EvalCurve, ConstantControlPointsGiveConstantCurve) {
    const auto c = SplineCurve::constant(5, {5.0, 7.0, 2.0});
    for (double t : {0.0, 0.3, 1.0, 2.71, 4.5, 5.0}) {
        const CurvePoint p = eval_curve(c, t);
        EXPECT_NEAR(p.x, 5.0, 1e-12);
        EXPECT_NEAR(p.y, 7.0, 1e-12);
        EXPECT_NEAR(p.r, 2.0, 1e-12);
    }
}

TEST(EvalCurve, NodeValueOfSingleSpike) {
    auto c = SplineCurve::constant(4, {0.0, 0.0, 0.0});
    c.at(2).x = 6.0;
    EXPECT_NEAR(eval_curve(c, 2.0).x, 4.0, 1e-12);
    EXPECT_NEAR(node_value(c, 2, Channel::X), 4.0, 1e-12);
}

TEST(EvalCurve, MatchesPiecewiseBasisOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = oracle::randomCurve(rng, 5);
        for (double t : {1.37, 0.0, 0.5, 2.0, 3.999, 5.0}) {
            const CurvePoint got = eval_curve(c, t);
            const ControlPoint want = oracle::evalDirect(c, t);
            EXPECT_LE(relErr(got.x, want.x), 1e-12);
            EXPECT_LE(relErr(got.y, want.y), 1e-12);
            EXPECT_LE(relErr(got.r, want.r), 1e-12);
        }
    }
}

TEST(EvalCurve, OutOfRangeParameterThrows) {
    const auto c = SplineCurve::constant(3, {0.0, 0.0, 1.0});
    EXPECT_THROW(eval_curve(c, -0.01), Error);
    EXPECT_THROW(eval_curve(c, 3.01), Error);
    EXPECT_THROW(eval_derivatives(c, 3.5), Error);
}

TEST(SplineCurve, NeedsFourControlPoints) {
    EXPECT_THROW(SplineCurve(std::vector<ControlPoint>(3)), Error);
    const SplineCurve c(std::vector<ControlPoint>(7));
    EXPECT_EQ(c.lastNode(), 4);
    EXPECT_EQ(c.nodeCount(), 5);
    EXPECT_EQ(c.coefficientCount(), c.lastNode() + 3);
}

TEST(SplineCurve, FlattenIsRowMajorAndRoundTrips) {
    std::mt19937_64 rng(3);
    const auto c = oracle::randomCurve(rng, 3);
    const auto flat = c.flatten();
    ASSERT_EQ(flat.size(), 3u * 6u);
    EXPECT_EQ(flat[3], c.at(0).x);
    EXPECT_EQ(flat[4], c.at(0).y);
    EXPECT_EQ(flat[5], c.at(0).r);
    SplineCurve d = SplineCurve::constant(3, {});
    d.assign(flat);
    EXPECT_EQ(c, d);
}

TEST(SplineProperties, PartitionOfUnity) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    const auto ones = SplineCurve::constant(6, {1.0, 1.0, 1.0});
    for (int k = 0; k < 500; ++k) {
        const double t = u(rng);
        EXPECT_NEAR(eval_curve(ones, t).x, 1.0, 1e-12);
        double sum = 0.0;
        for (int j = -1; j <= 7; ++j) {
            sum += oracle::basis(j, t);
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(SplineProperties, NodeRelationAtEveryNode) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = oracle::randomCurve(rng, 7);
        for (int i = 0; i <= c.lastNode(); ++i) {
            const CurvePoint p = eval_curve(c, i);
            const double want = (c.at(i - 1).x + 4.0 * c.at(i).x + c.at(i + 1).x) / 6.0;
            EXPECT_NEAR(p.x, want, 1e-12 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST(EvalDerivatives, ConstantCurveHasZeroDerivatives) {
    const auto c = SplineCurve::constant(3, {4.0, -2.0, 6.0});
    for (double t : {0.0, 1.5, 3.0}) {
        const auto d = eval_derivatives(c, t);
        EXPECT_NEAR(d.dx, 0.0, 1e-12);
        EXPECT_NEAR(d.dy, 0.0, 1e-12);
        EXPECT_NEAR(d.dr, 0.0, 1e-12);
        EXPECT_NEAR(d.ddx, 0.0, 1e-12);
        EXPECT_NEAR(d.ddy, 0.0, 1e-12);
    }
}

TEST(EvalDerivatives, EquallySpacedLineHasConstantSpeed) {
    const double s = 7.5;
    std::vector<ControlPoint> cps;
    for (int j = -1; j <= 6; ++j) {
        cps.push_back({10.0 + 0.6 * s * j, 20.0 + 0.8 * s * j, 3.0});
    }
    const SplineCurve c(std::move(cps));
    for (double t : {0.5, 1.0, 2.25, 4.9}) {
        const auto d = eval_derivatives(c, t);
        EXPECT_NEAR(std::hypot(d.dx, d.dy), s, 1e-10);
        EXPECT_NEAR(d.ddx, 0.0, 1e-10);
        EXPECT_NEAR(d.ddy, 0.0, 1e-10);
    }
}

TEST(EvalDerivatives, AgreeWithCentralDifferences) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.01, 4.99);
    const double h = 1e-5;
    for (int k = 0; k < 100; ++k) {
        const auto c = oracle::randomCurve(rng, 5);
        const double t = k == 0 ? 2.5 : ut(rng);
        const auto d = eval_derivatives(c, t);
        const auto fx = [&](double s) { return eval_curve(c, s).x; };
        const auto fy = [&](double s) { return eval_curve(c, s).y; };
        const auto fr = [&](double s) { return eval_curve(c, s).r; };
        const auto fdx = [&](double s) { return eval_derivatives(c, s).dx; };
        const auto fdy = [&](double s) { return eval_derivatives(c, s).dy; };
        EXPECT_NEAR(d.dx, oracle::centralDiff(fx, t, h), 1e-6);
        EXPECT_NEAR(d.dy, oracle::centralDiff(fy, t, h), 1e-6);
        EXPECT_NEAR(d.dr, oracle::centralDiff(fr, t, h), 1e-6);
        EXPECT_NEAR(d.ddx, oracle::centralDiff(fdx, t, h), 1e-6);
        EXPECT_NEAR(d.ddy, oracle::centralDiff(fdy, t, h), 1e-6);
    }
}

TEST(Curvature, StraightLineIsZero) {
    std::vector<ControlPoint> cps;
    for (int j = -1; j <= 5; ++j) {
        cps.push_back({3.0 * j, -2.0 * j, 4.0});
    }
    const SplineCurve c(std::move(cps));
    for (double t : {0.0, 1.3, 2.5, 4.0}) {
        EXPECT_NEAR(curvature(c, t), 0.0, 1e-12);
    }
}

TEST(Curvature, DenseCircleSamplesGiveInverseRadius) {
    const double rho = 40.0;
    const auto c = oracle::circleCurve(rho, 24, 2.0 * std::numbers::pi / 48.0);
    for (double t = 1.0; t <= 23.0; t += 0.37) {
        EXPECT_NEAR(std::abs(curvature(c, t)), 1.0 / rho, 0.05 / rho) << "t = " << t;
    }
}

TEST(Curvature, DegenerateCurveIsZero) {
    const auto c = SplineCurve::constant(3, {1.0, 1.0, 1.0});
    EXPECT_EQ(curvature(c, 1.5), 0.0);
}

TEST(Curvature, SignFollowsTurnDirection) {
    const auto ccw = oracle::circleCurve(30.0, 8, 0.2);
    EXPECT_GT(curvature(ccw, 4.0), 0.0);
    auto cw = ccw;
    for (auto& p : cw.controlPoints()) {
        p.y = -p.y;
    }
    EXPECT_LT(curvature(cw, 4.0), 0.0);
}

// ---------------------------------------------------------------------------

namespace {

ConstraintSet xyAt(std::initializer_list<int> nodes) {
    ConstraintSet cs;
    for (int n : nodes) {
        cs.add({n, {}, {true, true, false}});
    }
    return cs;
}

}  // namespace

TEST(ConstraintNullspace, NoConstraintsGivesIdentity) {
    const auto dirs = constraint_nullspace({}, 3);
    ASSERT_EQ(dirs.size(), 3u * 6u);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        ASSERT_EQ(dirs[k].entries.size(), 1u);
        EXPECT_EQ(dirs[k].entries[0].second, 1.0);
        EXPECT_EQ(dirs[k].entries[0].first, static_cast<int>(k % 6));
        EXPECT_EQ(static_cast<int>(dirs[k].channel), static_cast<int>(k / 6));
    }
}

TEST(ConstraintNullspace, IsolatedConstraintUsesQuarterDirections) {
    const ConstraintSet cs = xyAt({2});
    const auto dirs = constraint_nullspace(cs, 4);
    // Coefficient c_1 (storage 2) and c_3 (storage 4) pair with pivot c_2 (storage 3).
    const double norm = std::sqrt(1.0 + 1.0 / 16.0);
    int found = 0;
    for (const auto& d : dirs) {
        if (d.channel != Channel::X || d.entries.size() != 2) {
            continue;
        }
        ++found;
        const auto& [a, wa] = d.entries[0];
        const auto& [b, wb] = d.entries[1];
        if (a == 2) {
            EXPECT_EQ(b, 3);
            EXPECT_NEAR(wa, 1.0 / norm, 1e-15);
            EXPECT_NEAR(wb, -0.25 / norm, 1e-15);
        } else {
            EXPECT_EQ(a, 3);
            EXPECT_EQ(b, 4);
            EXPECT_NEAR(wa, -0.25 / norm, 1e-15);
            EXPECT_NEAR(wb, 1.0 / norm, 1e-15);
        }
    }
    EXPECT_EQ(found, 2);

    std::mt19937_64 rng(9);
    const auto c = oracle::randomCurve(rng, 4);
    for (const auto& d : dirs) {
        SplineCurve moved = c;
        apply_direction(moved, d, 3.7);
        EXPECT_NEAR(eval_curve(moved, 2.0).x, eval_curve(c, 2.0).x, 1e-12);
        EXPECT_NEAR(eval_curve(moved, 2.0).y, eval_curve(c, 2.0).y, 1e-12);
    }
}

TEST(ConstraintNullspace, SharedCoefficientLayout) {
    const ConstraintSet cs = xyAt({0, 2});
    const int n = 4;
    const auto dirs = constraint_nullspace(cs, n);
    std::size_t xDirs = 0;
    for (const auto& d : dirs) {
        xDirs += d.channel == Channel::X;
    }
    EXPECT_EQ(xDirs, static_cast<std::size_t>(n + 3 - 2));
    EXPECT_EQ(dirs.size(), 2 * (n + 3 - 2) + (n + 3));

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> mag(-1000.0, 1000.0);
    const auto c = oracle::randomCurve(rng, n);
    for (const auto& d : dirs) {
        SplineCurve moved = c;
        apply_direction(moved, d, mag(rng));
        for (int node : {0, 2}) {
            EXPECT_NEAR(eval_curve(moved, node).x, eval_curve(c, node).x, 1e-12 * 1000.0);
            EXPECT_NEAR(eval_curve(moved, node).y, eval_curve(c, node).y, 1e-12 * 1000.0);
        }
    }
}

TEST(ConstraintNullspace, DirectionsAreUnitAndIndependent) {
    const ConstraintSet cs = xyAt({0, 2, 4, 6});
    const auto dirs = constraint_nullspace(cs, 6);
    const int m = 9;
    std::vector<std::vector<double>> rows;
    for (const auto& d : dirs) {
        const auto v = d.dense(m);
        double n2 = 0.0;
        for (double x : v) n2 += x * x;
        EXPECT_NEAR(n2, 1.0, 1e-12);
        rows.push_back(v);
    }
    // Rank by Gaussian elimination.
    int rank = 0;
    const std::size_t cols = rows.front().size();
    for (std::size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
        std::size_t piv = rank;
        for (std::size_t r = rank; r < rows.size(); ++r) {
            if (std::abs(rows[r][col]) > std::abs(rows[piv][col])) piv = r;
        }
        if (std::abs(rows[piv][col]) < 1e-12) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<std::size_t>(rank)) continue;
            const double f = rows[r][col] / rows[rank][col];
            for (std::size_t k = 0; k < cols; ++k) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    EXPECT_EQ(rank, static_cast<int>(dirs.size()));
    EXPECT_EQ(static_cast<int>(dirs.size()), 3 * m - 2 * 4);
}

TEST(ConstraintNullspace, RandomMagnitudesPreserveAllConstraints) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> mag(-1000.0, 1000.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 5;
        const int n = 2 * (k - 1);
        ConstraintSet cs;
        auto c = oracle::randomCurve(rng, n);
        for (int s = 0; s < k; ++s) {
            const CurvePoint v = eval_curve(c, 2 * s);
            cs.add({2 * s, v, {true, true, s % 2 == 0}});
        }
        for (const auto& d : constraint_nullspace(cs, n)) {
            apply_direction(c, d, mag(rng));
            EXPECT_LE(max_constraint_residual(c, cs), 1e-9);
        }
    }
}

TEST(ConstraintNullspace, AdjacentConstraintsAreRejectedWithTheirNodes) {
    const ConstraintSet cs = xyAt({1, 2});
    try {
        constraint_nullspace(cs, 4);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("1 and 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(constraint_nullspace(xyAt({5}), 4), Error);
}

TEST(ConstraintNullspace, DisjointChannelsMayShareNeighbors) {
    ConstraintSet cs;
    cs.add({1, {}, {true, false, false}});
    cs.add({2, {}, {false, true, false}});
    EXPECT_NO_THROW(constraint_nullspace(cs, 4));
}

TEST(ConstraintStepRelation, OffsetsPreserveNodeValue) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto c = oracle::randomCurve(rng, 4);
        const double before = eval_curve(c, 2.0).x;
        const double a = u(rng);
        const double b = u(rng);
        c.at(1).x += a;
        c.at(2).x += -a / 4.0 - b / 4.0;
        c.at(3).x += b;
        EXPECT_NEAR(eval_curve(c, 2.0).x, before, 1e-12 * 100.0);
    }
}

// ---------------------------------------------------------------------------

TEST(SplineJson, RoundTripIsExact) {
    std::mt19937_64 rng(14);
    const auto c = oracle::randomCurve(rng, 6);
    const std::string text = spline_to_json(c);
    const auto back = spline_from_json(text);
    EXPECT_EQ(back, c);
    const auto doc = nlohmann::json::parse(text);
    EXPECT_EQ(doc.at("nodes").get<int>(), 7);
    EXPECT_EQ(doc.at("control_points").size(), 9u);
}

TEST(SplineJson, IntegersStayReal) {
    const auto c = SplineCurve::constant(1, {1.0, 2.0, 3.0});
    const std::string text = spline_to_json(c);
    EXPECT_NE(text.find("[1.0, 2.0, 3.0]"), std::string::npos) << text;
}

TEST(SplineJson, RejectsMalformedDocuments) {
    EXPECT_THROW(spline_from_json(std::string("{")), Error);
    EXPECT_THROW(spline_from_json(std::string(R"({"nodes": 3, "control_points": [[0,0,0]]})")), Error);
    EXPECT_THROW(spline_from_json(std::string(R"({"control_points": []})")), Error);
}

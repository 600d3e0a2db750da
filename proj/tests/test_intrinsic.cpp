#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swaylab/intrinsic.hpp"

using namespace swaylab;

namespace {

// Uniform samples on a `manifold`-dimensional unit patch embedded in `ambient` dims
// through a fixed random orthonormal frame.
PointCloud embedded_patch(std::size_t n, std::size_t manifold, std::size_t ambient, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0, 1);
    std::vector<std::vector<double>> frame;
    while (frame.size() < manifold) {
        std::vector<double> v(ambient);
        for (auto& x : v) x = g(rng);
        for (const auto& u : frame) {
            double dot = 0;
            for (std::size_t i = 0; i < ambient; ++i) dot += v[i] * u[i];
            for (std::size_t i = 0; i < ambient; ++i) v[i] -= dot * u[i];
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        for (auto& x : v) x /= std::sqrt(norm);
        frame.push_back(v);
    }
    std::uniform_real_distribution<double> u(0, 1);
    PointCloud pts(n, std::vector<double>(ambient, 0.3));
    for (auto& p : pts)
        for (const auto& axis : frame) {
            const double t = u(rng);
            for (std::size_t i = 0; i < ambient; ++i) p[i] += t * axis[i];
        }
    return pts;
}

}  // namespace

TEST(CorrelationIntegral, Examples) {
    const PointCloud pts{{0}, {1}, {2}};
    EXPECT_NEAR(correlation_integral(pts, 1.5), 2.0 / 3, 1e-12);
    EXPECT_EQ(correlation_integral(pts, 3), 1.0);
    EXPECT_EQ(correlation_integral(pts, 0.5), 0.0);
    EXPECT_EQ(correlation_integral(pts, 1.0), 0.0);  // strictly within
    EXPECT_THROW(correlation_integral(PointCloud{{0}}, 1), ContractError);
    EXPECT_THROW(correlation_integral(pts, 0), ContractError);
}

TEST(CorrelationIntegral, MonotoneAndMatchesSortedLookup) {
    const auto pts = embedded_patch(200, 3, 5, 1);
    const auto sorted = pairwise_distances(pts);
    double prev = 0;
    for (double r = 0.01; r < 2.5; r *= 1.3) {
        const double c = correlation_integral(pts, r);
        EXPECT_GE(c, prev);
        EXPECT_DOUBLE_EQ(c, correlation_from_sorted(sorted, r));
        prev = c;
    }
    EXPECT_EQ(correlation_integral(pts, sorted.back() + 1e-9), 1.0);
}

TEST(IntrinsicDimension, Segment) {
    EXPECT_NEAR(intrinsic_dimension(embedded_patch(1000, 1, 10, 2)), 1.0, 0.15);
}

TEST(IntrinsicDimension, Plane) {
    EXPECT_NEAR(intrinsic_dimension(embedded_patch(1000, 2, 10, 3)), 2.0, 0.2);
}

TEST(IntrinsicDimension, IsometryInvariant) {
    auto pts = embedded_patch(400, 3, 4, 4);
    const double base = intrinsic_dimension(pts);
    // Rotate the first two coordinates and translate everything.
    const double c = std::cos(0.7), s = std::sin(0.7);
    for (auto& p : pts) {
        const double x = p[0], y = p[1];
        p[0] = c * x - s * y + 5;
        p[1] = s * x + c * y - 2;
        p[3] += 11;
    }
    EXPECT_NEAR(intrinsic_dimension(pts), base, 0.02);  // rounding moves a few pairs across radii
}

TEST(IntrinsicDimension, ErrorCases) {
    const PointCloud same(10, std::vector<double>{1, 1});
    EXPECT_THROW(intrinsic_dimension(same), UndefinedIndicator);
    const PointCloud two{{0, 0}, {1, 0}};
    EXPECT_THROW(intrinsic_dimension(two, 0.1, 0.5), UndefinedIndicator);
    EXPECT_THROW(log_radii(1, 0.5, 10), ContractError);
    EXPECT_THROW(log_radii(0.1, 0.5, 1), ContractError);
}

TEST(LogRadii, Endpoints) {
    const auto r = log_radii(0.01, 1, 3);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], 0.01, 1e-15);
    EXPECT_NEAR(r[1], 0.1, 1e-12);
    EXPECT_NEAR(r[2], 1, 1e-12);
}

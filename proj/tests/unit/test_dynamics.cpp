#include "planted.hpp"

#include "tclab/dynamics.hpp"
#include "tclab/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace tclab;

namespace {

using oracle::planted;

double planted_slope(const Trajectory& traj) {
    const auto cloud = dynamics_points(traj);
    return fit_dynamics_slope(cloud.points, default_window(cloud.points)).slope;
}

}  // namespace

TEST(Differentiate, ConstantSeriesHasZeroDerivative) {
    const std::vector<double> t{0, 1, 3, 4, 9};
    const std::vector<double> v(5, 2.5);
    for (const auto& p : differentiate(t, v)) EXPECT_EQ(p.derivative, 0.0);
}

TEST(Differentiate, LinearSeriesExactOnUnevenGrid) {
    const std::vector<double> t{0, 1, 3, 4, 9, 10, 25};
    std::vector<double> v;
    for (double x : t) v.push_back(-0.7 * x + 3.0);
    for (const auto& p : differentiate(t, v)) EXPECT_NEAR(p.derivative, -0.7, 1e-9);
}

TEST(Differentiate, QuadraticExactAtInteriorPoints) {
    const std::vector<double> t{0, 0.5, 2, 2.25, 4};
    std::vector<double> v;
    for (double x : t) v.push_back(x * x);
    const auto d = differentiate(t, v);
    for (std::size_t k = 1; k + 1 < d.size(); ++k) EXPECT_NEAR(d[k].derivative, 2 * t[k], 1e-12);
}

TEST(Differentiate, ExponentialRateWithinDiscretisationBound) {
    const double c = 0.8, h = 0.01;
    std::vector<double> t, v;
    for (int k = 0; k <= 500; ++k) {
        t.push_back(k * h);
        v.push_back(std::exp(c * k * h));
    }
    const auto d = differentiate(t, v);
    // central: relative error ~ (ch)^2/6; one-sided ends: ~ ch/2
    for (std::size_t k = 1; k + 1 < d.size(); ++k) EXPECT_NEAR(d[k].derivative / d[k].value, c, c * (c * h) * (c * h) / 5);
    EXPECT_NEAR(d.front().derivative / d.front().value, c, c * c * h);
    EXPECT_NEAR(d.back().derivative / d.back().value, c, c * c * h);
}

TEST(Differentiate, RejectsShortOrNonIncreasingInput) {
    const std::vector<double> two{0, 1};
    EXPECT_THROW((void)differentiate(two, two), DomainError);
    const std::vector<double> t{0, 1, 1}, v{1, 2, 3};
    EXPECT_THROW((void)differentiate(t, v), DomainError);
    const std::vector<double> t3{0, 1, 2}, v2{1, 2};
    EXPECT_THROW((void)differentiate(t3, v2), DimensionError);
}

TEST(Differentiate, TrajectoryIndexing) {
    const auto traj = planted(1.0, 1.0, 1.0, 2, {0.1, 0.2});
    const auto d = differentiate_trajectory(traj, 1, 1);
    ASSERT_EQ(d.size(), traj.rows.size());
    EXPECT_DOUBLE_EQ(d[3].value, traj.rows[3].sigmas[1][1]);
    EXPECT_EQ(d[3].t, 300.0);
    EXPECT_THROW((void)differentiate_trajectory(traj, 2, 0), DimensionError);
    EXPECT_THROW((void)differentiate_trajectory(traj, 0, 2), DimensionError);
}

TEST(DynamicsFit, RecoversFourThirds) {
    EXPECT_NEAR(planted_slope(planted(4.0 / 3.0, 12.0)), 4.0 / 3.0, 0.02 * 4.0 / 3.0);
}

class PlantedDepth : public ::testing::TestWithParam<int> {};

TEST_P(PlantedDepth, SlopeMatchesDepthExponent) {
    const double L = GetParam();
    const double e = 2.0 * (1.0 - 1.0 / L);
    EXPECT_NEAR(planted_slope(planted(e, oracle::planted_rate(e))), e, 0.05 * e);
}

INSTANTIATE_TEST_SUITE_P(Depths, PlantedDepth, ::testing::Values(2, 3, 4));

TEST(DynamicsFit, SlopeInvariantToGammaScale) {
    const auto a = planted(4.0 / 3.0, 12.0, 1.0, 1, {0.01, 0.02});
    auto b = a;
    for (auto& row : b.rows) *row.recon_error *= 37.5;
    const auto ca = dynamics_points(a);
    const auto cb = dynamics_points(b);
    const auto w = default_window(ca.points);
    const auto fa = fit_dynamics_slope(ca.points, w);
    const auto fb = fit_dynamics_slope(cb.points, w);
    EXPECT_NEAR(fa.slope, fb.slope, 1e-9);
    EXPECT_NEAR(fa.intercept - fb.intercept, std::log(37.5), 1e-9);
}

TEST(DynamicsFit, TwoPointsInterpolateExactly) {
    const std::vector<DynamicsPoint> pts{{1.0, 2.0, 0, 0, 0}, {3.0, 7.0, 0, 0, 1}};
    const auto fit = fit_dynamics_slope(pts);
    EXPECT_DOUBLE_EQ(fit.slope, 2.5);
    EXPECT_DOUBLE_EQ(fit.intercept, -0.5);
    EXPECT_DOUBLE_EQ(fit.r2, 1.0);
    EXPECT_EQ(fit.used, 2u);
}

TEST(DynamicsFit, DegenerateWindowThrows) {
    const std::vector<DynamicsPoint> same{{1.0, 2.0, 0, 0, 0}, {1.0, 3.0, 0, 0, 1}, {1.0, 1.0, 0, 0, 2}};
    EXPECT_THROW((void)fit_dynamics_slope(same), DomainError);
    const std::vector<DynamicsPoint> pts{{1.0, 2.0, 0, 0, 0}, {3.0, 7.0, 0, 0, 1}};
    EXPECT_THROW((void)fit_dynamics_slope(pts, Window{2.0, 2.5}), DomainError);
}

TEST(DynamicsPoints, NonPositiveSamplesAreCountedNotDropped) {
    auto traj = planted(1.0, 4.0, 1.0, 1, {0.01, 0.05});
    // a flat singular value has zero derivative everywhere
    for (auto& row : traj.rows) row.sigmas[0][1] = 0.05;
    const auto cloud = dynamics_points(traj);
    EXPECT_EQ(cloud.excluded, traj.rows.size());
    EXPECT_EQ(cloud.points.size() + cloud.excluded, 2 * traj.rows.size());

    const auto top = dynamics_points(traj, CloudSelection{std::nullopt, 1});
    EXPECT_EQ(top.excluded, 0u);

    traj.rows[4].recon_error.reset();
    EXPECT_THROW((void)dynamics_points(traj), DomainError);
}

TEST(DepthReport, SingleLabelSingleRow) {
    const std::vector<LabelledRuns> groups{{"1-1-1", {planted(1.0, 4.0)}}};
    const auto report = depth_sweep_report(groups);
    ASSERT_EQ(report.rows.size(), 1u);
    EXPECT_EQ(report.rows[0].label, "1-1-1");
}

TEST(DepthReport, RecoversPlantedOrdering) {
    const std::vector<LabelledRuns> groups{
        {"low", {planted(1.0, 4.0, 1.0, 1, {0.01}), planted(1.0, 4.0, 1.0, 1, {0.02})}},
        {"high", {planted(2.0, 40.0, 1.0, 1, {0.01}), planted(2.0, 40.0, 1.0, 1, {0.02})}},
    };
    const auto report = depth_sweep_report(groups);
    ASSERT_EQ(report.rows.size(), 2u);
    EXPECT_LT(report.rows[0].fit.slope, report.rows[1].fit.slope);
    EXPECT_NEAR(report.rows[0].fit.slope, 1.0, 0.05);
    EXPECT_NEAR(report.rows[1].fit.slope, 2.0, 0.1);
    EXPECT_LT(report.window.lo, report.window.hi);
}

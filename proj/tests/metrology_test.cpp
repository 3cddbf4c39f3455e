#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qsnom/metrology.hpp"

using namespace qsnom;

namespace {

ForwardParams worked(double eps = 3.0)
{
    ForwardParams fp;
    fp.epsilon_d = eps;
    fp.R = 0.5;
    fp.omega = 1.0;
    fp.kappa = 1.0;
    return fp;
}

InversionProblem problem_for(const ForwardParams& fp, double observed)
{
    InversionProblem p;
    p.observed_omega_s = observed;
    p.R = fp.R;
    p.omega = fp.omega;
    p.kappa = fp.kappa;
    p.model = fp.model;
    return p;
}

} // namespace

TEST(Forward, Vacuum)
{
    const auto r = forward(worked(1.0));
    EXPECT_EQ(r.delta_e, 0.0);
    EXPECT_EQ(r.omega_s, 1.0);
    EXPECT_EQ(r.amplitude, 1.0);
    EXPECT_EQ(r.delta_e_oracle, 0.0);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Forward, WorkedFixture)
{
    const auto r = forward(worked());
    EXPECT_EQ(r.alpha, 0.5);
    EXPECT_NEAR(r.delta_e, -0.2, 1e-15);
    EXPECT_NEAR(r.omega_s, 0.8, 1e-15);
    EXPECT_NEAR(r.amplitude, 0.92, 1e-15);
    // g = 0.5 eV is far outside the perturbative window.
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Forward, MetalLimit)
{
    const auto r = forward(worked(1e8));
    // -kappa^2 / ((2R)^3 2 Omega)
    EXPECT_NEAR(r.delta_e, -0.5, 1e-7);
}

TEST(Forward, OracleModelSelectsEngineShift)
{
    auto fp = worked();
    fp.R = 1.0;
    fp.kappa = 0.05;
    fp.model = ShiftModel::Oracle;
    const auto r = forward(fp);
    const double g = 0.05 * 0.5 / 8.0;
    EXPECT_NEAR(r.delta_e, -g * g / 1.25, 1e-18);
    EXPECT_EQ(r.delta_e, r.delta_e_oracle);
    EXPECT_NEAR(r.amplitude, 1.0 / std::sqrt(1.0 + (g / 1.25) * (g / 1.25)), 1e-15);
    EXPECT_NEAR(shift_magnitude(fp), std::abs(r.delta_e), 1e-18);
}

TEST(Forward, NearFieldWarningAtLargeR)
{
    auto fp = worked();
    fp.R = 50.0;
    const auto r = forward(fp);
    EXPECT_FALSE(r.near_field.pass);
    EXPECT_NE(r.warnings.front().find("near_field"), std::string::npos);
}

TEST(Forward, Errors)
{
    try {
        forward(worked(0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedPermittivity);
    }
    auto fp = worked(1e6);
    fp.kappa = 3.0;  // |delta_e| -> 4.5 eV > Omega
    try {
        forward(fp);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ShiftExceedsGap);
    }
}

TEST(Forward, OmegaStrictlyDecreasingInPermittivity)
{
    double prev = forward(worked(1.0 + 1e-6)).omega_s;
    for (double eps = 1.0 + 1e-3; eps < 1e6; eps *= 1.2) {
        const double w = forward(worked(eps)).omega_s;
        ASSERT_LT(w - prev, 0.0) << eps;
        prev = w;
    }
}

TEST(Invert, RoundTripAtFour)
{
    const auto fp = worked();
    const double observed = forward(worked(4.0)).omega_s;
    const auto r = invert_permittivity(problem_for(fp, observed));
    EXPECT_NEAR(r.epsilon_d, 4.0, 4e-6);
    EXPECT_LE(r.iterations, 200u);
    EXPECT_LT(r.residual, 1e-10);
}

TEST(Invert, VacuumFrequencyReturnsLowerBracket)
{
    const auto p = problem_for(worked(), 1.0);
    const auto r = invert_permittivity(p);
    EXPECT_NEAR(r.epsilon_d, 1.0, 1e-8);
    EXPECT_EQ(r.epsilon_d, p.eps_lo);
}

TEST(Invert, AboveGapIsOutOfBracket)
{
    try {
        invert_permittivity(problem_for(worked(), 1.01));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfBracket);
    }
    try {
        invert_permittivity(problem_for(worked(), 0.4));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfBracket);
    }
}

TEST(Invert, ValidatesProblem)
{
    auto p = problem_for(worked(), 0.9);
    p.tol_rel = 0.0;
    EXPECT_THROW(invert_permittivity(p), Error);
    p = problem_for(worked(), 0.9);
    p.eps_lo = 1.0;
    EXPECT_THROW(invert_permittivity(p), Error);
    p = problem_for(worked(), 0.9);
    p.eps_hi = 0.5;
    EXPECT_THROW(invert_permittivity(p), Error);
}

TEST(Invert, NoConvergenceWhenIterationBudgetTiny)
{
    auto p = problem_for(worked(), forward(worked(7.3)).omega_s);
    p.max_iter = 1;
    try {
        invert_permittivity(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
    }
}

TEST(Invert, RandomRoundTripsDefaultParameters)
{
    // Default R = 1 nm, kappa = 0.05: shifts of order 1e-4 eV.
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(std::log(1.01), std::log(100.0));
    for (auto model : {ShiftModel::Paper, ShiftModel::Oracle}) {
        for (int i = 0; i < 50; ++i) {
            ForwardParams fp;
            fp.model = model;
            fp.epsilon_d = std::exp(u(rng));
            const auto r = invert_permittivity(problem_for(fp, forward(fp).omega_s));
            ASSERT_NEAR(r.epsilon_d, fp.epsilon_d, 1e-6 * fp.epsilon_d) << to_string(model);
            ASSERT_LE(r.iterations, 200u);
        }
    }
}

TEST(Sweep, PermittivityAxis)
{
    SweepSpec s;
    s.fixed = worked();
    s.values = {1.0, 3.0, 11.7};
    const auto rows = run_sweep(s);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].result->delta_e_paper, 0.0);
    EXPECT_NEAR(rows[1].result->delta_e_paper, -0.2, 1e-15);
    const double a = 10.7 / 12.7;
    EXPECT_NEAR(rows[2].result->delta_e_paper, -a * a / (1 + a * a), 1e-15);
    EXPECT_NEAR(rows[2].result->delta_e_paper, -0.41514975705272319, 1e-15);
    EXPECT_GT(rows[0].result->delta_e_paper, rows[1].result->delta_e_paper);
    EXPECT_GT(rows[1].result->delta_e_paper, rows[2].result->delta_e_paper);
}

TEST(Sweep, RadiusAxisInverseCube)
{
    SweepSpec s;
    s.axis = SweepAxis::R;
    s.fixed = worked();
    s.values = {0.5, 1.0};
    const auto rows = run_sweep(s);
    EXPECT_NEAR(rows[0].result->delta_e_paper / rows[1].result->delta_e_paper, 8.0, 1e-12);
}

TEST(Sweep, PerPointErrorsDoNotAbort)
{
    SweepSpec s;
    s.axis = SweepAxis::Kappa;
    s.fixed = worked(1e6);
    s.values = {0.5, 3.0};
    const auto rows = run_sweep(s);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].result.has_value());
    EXPECT_FALSE(rows[1].result.has_value());
    EXPECT_NE(rows[1].error.find("ShiftExceedsGap"), std::string::npos);
}

TEST(Sweep, SpecValidation)
{
    SweepSpec s;
    s.values = {1.0, 2.0};
    s.outputs.clear();
    EXPECT_THROW(run_sweep(s), Error);
    s.outputs = {"alpha"};
    s.values = {1.0};
    EXPECT_THROW(run_sweep(s), Error);
    s.values = {1.0, 3.0, 2.0};
    EXPECT_THROW(run_sweep(s), Error);
    s.values = {1.0, 2.0};
    s.outputs = {"bogus"};
    EXPECT_THROW(run_sweep(s), Error);
}

TEST(Sweep, Spacing)
{
    const auto lin = linspace(1.0, 2.0, 5);
    EXPECT_EQ(lin, (std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0}));
    const auto lg = logspace(0.5, 4.0, 4);
    EXPECT_EQ(lg.front(), 0.5);
    EXPECT_NEAR(lg[1], 1.0, 1e-15);
    EXPECT_NEAR(lg[2], 2.0, 1e-15);
    EXPECT_EQ(lg.back(), 4.0);
}

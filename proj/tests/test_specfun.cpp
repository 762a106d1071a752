#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include "knt/error.hpp"
#include "knt/specfun.hpp"
#include "oracles.hpp"

using namespace knt;

TEST(ExpIntegral, MatchesSeriesOracle)
{
    EXPECT_NEAR(exp_integral_E1(1.0), oracle::e1_series(1.0), 1e-13);
    EXPECT_NEAR(exp_integral_E1(1.0), 0.219383934395520, 1e-13);
    for (double x : {0.01, 0.3, 0.9, 1.0})
        EXPECT_NEAR(exp_integral_E1(x), oracle::e1_series(x), 1e-12) << x;
}

TEST(ExpIntegral, BranchesAgreeAcrossSwitch)
{
    for (double x = 0.5; x <= 2.0; x += 0.0625)
    {
        double ref = boost::math::expint(1, x);
        EXPECT_NEAR(exp_integral_E1(x), ref, 1e-13) << x;
        EXPECT_NEAR(oracle::e1_series(x), ref, 1e-12) << x;
    }
}

TEST(ExpIntegral, UpperBoundAgainstQuadrature)
{
    for (double x : {2.0, 5.0, 10.0})
    {
        double direct = oracle::adaptive_simpson(
            [](double t) { return std::exp(-t) / t; }, x, x + 60, 1e-14);
        EXPECT_NEAR(exp_integral_E1(x), direct, 1e-11);
        EXPECT_LT(exp_integral_E1(x), std::exp(-x) / x);
    }
}

TEST(ExpIntegral, Asymptotics)
{
    double x = 50;
    EXPECT_NEAR(x * std::exp(x) * exp_integral_E1(x), 1.0, 0.03);
    // Truncated asymptotic series sum_k (-1)^k k!/x^k, k <= 5
    double asym = 0, term = 1;
    for (int k = 0; k <= 5; ++k)
    {
        asym += term;
        term *= -(k + 1) / x;
    }
    EXPECT_NEAR(x * std::exp(x) * exp_integral_E1(x), asym, 1e-6);
}

TEST(ExpIntegral, Domain)
{
    EXPECT_THROW(exp_integral_E1(0.0), DomainError);
    EXPECT_THROW(exp_integral_E1(-1.0), DomainError);
    EXPECT_THROW(layer_sources(-0.1), DomainError);
}

TEST(ExpIntegral, HigherOrders)
{
    for (int n : {2, 3})
        for (double x : {0.05, 0.5, 1.5, 7.0, 30.0})
            EXPECT_NEAR(exp_integral_En(n, x), boost::math::expint(n, x),
                        1e-13)
                << n << " " << x;
    EXPECT_DOUBLE_EQ(exp_integral_En(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(exp_integral_En(3, 0), 0.5);
}

TEST(Kernel, EvenPositiveDecreasing)
{
    double prev = INFINITY;
    for (double z = 1e-6; z < 50; z *= 1.3)
    {
        double e = kernel_E(z);
        EXPECT_GT(e, 0);
        EXPECT_EQ(e, kernel_E(-z));
        EXPECT_LT(e, prev);
        prev = e;
    }
}

TEST(Kernel, Moments)
{
    auto m = kernel_moments();
    EXPECT_NEAR(m.m0_plus, 0.5, 1e-9);
    EXPECT_NEAR(m.m1_plus, 0.25, 1e-9);
    EXPECT_NEAR(m.m2_plus, 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(m.m_total, 1.0, 1e-9);
}

TEST(Kernel, Antiderivative)
{
    EXPECT_NEAR(kernel_E_antiderivative(0, 40), 0.5, 1e-9);
    for (double c : {0.01, 0.7, 3.0})
        EXPECT_NEAR(kernel_E_antiderivative(-c, c),
                    2 * kernel_E_antiderivative(0, c), 1e-15);
    double ref = oracle::adaptive_simpson(
        [](double z) { return kernel_E(z); }, 0.1, 0.2, 1e-14);
    EXPECT_NEAR(kernel_E_antiderivative(0.1, 0.2), ref, 1e-10);
    EXPECT_THROW(kernel_E_antiderivative(1, 0), ArgumentError);
}

TEST(Kernel, FirstMomentAntiderivative)
{
    for (double b : {0.05, 0.8, 4.0})
    {
        double ref = oracle::adaptive_simpson(
            [](double z) { return z * kernel_E(z); }, 1e-300, b, 1e-14);
        EXPECT_NEAR(kernel_E_F1(b), ref, 1e-10) << b;
        EXPECT_EQ(kernel_E_F1(-b), kernel_E_F1(b));
    }
    EXPECT_NEAR(kernel_E_F1(60), 0.25, 1e-15);
}

TEST(LayerSources, LimitsAndDefiningIntegrals)
{
    auto [s1, s2] = layer_sources(0);
    EXPECT_EQ(s1, 0.5);
    EXPECT_EQ(s2, 1.0);
    for (double y : {0.5, 1.0, 2.0})
    {
        double r2 = oracle::adaptive_simpson(
            [y](double s) { return s > 0 ? std::exp(-y / s) : 0.0; }, 0, 1,
            1e-14);
        double r1 = oracle::adaptive_simpson(
            [y](double s) { return s > 0 ? s * std::exp(-y / s) : 0.0; }, 0,
            1, 1e-14);
        auto [a1, a2] = layer_sources(y);
        EXPECT_NEAR(a1, r1, 1e-9) << y;
        EXPECT_NEAR(a2, r2, 1e-9) << y;
    }
}

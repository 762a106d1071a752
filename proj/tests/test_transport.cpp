#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "knt/absorption.hpp"
#include "knt/error.hpp"
#include "knt/quadrature.hpp"
#include "knt/transport.hpp"
#include "oracles.hpp"

using namespace knt;

namespace
{
Vec3 random_in_ball(std::mt19937_64& rng, double radius = 1.0)
{
    std::uniform_real_distribution<double> U(-1, 1);
    while (true)
    {
        Vec3 x(U(rng), U(rng), U(rng));
        if (x.norm() < 1)
            return radius * x;
    }
}

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> N(0, 1);
    return Vec3(N(rng), N(rng), N(rng)).normalized();
}

// Kernel mass of a point on the z axis by adaptive Simpson over mu.
double mass_oracle(double r, double kn)
{
    return oracle::adaptive_simpson(
        [&](double mu) {
            double s = r * mu + std::sqrt(r * r * mu * mu + 1 - r * r);
            return 0.5 * -std::expm1(-s / kn);
        },
        -1, 1, 1e-13);
}

double upper_incomplete_moment(int k, double h)
{
    // int_0^h t^k e^{-t} dt = e^{-h} sum_{j>=0} k! h^{k+1+j} / (k+1+j)!
    double term = 1;
    for (int j = 1; j <= k + 1; ++j)
        term *= h / j;
    double fact = 1;
    for (int j = 2; j <= k; ++j)
        fact *= j;
    double sum = 0;
    for (int j = k + 2; term > 1e-18 * sum; ++j)
    {
        sum += term;
        term *= h / j;
    }
    return fact * std::exp(-h) * sum;
}
}  // namespace

TEST(Transport, ExponentialGaussExactness)
{
    for (double h : {0.1, 1.0, 3.0, 8.0})
    {
        for (int n : {2, 4, 6})
        {
            Rule1D r = gauss_exponential(h, n);
            for (int k = 0; k < 2 * n; ++k)
            {
                double q = 0;
                for (std::size_t i = 0; i < r.size(); ++i)
                    q += r.w[i] * std::pow(r.x[i], k);
                double ref = upper_incomplete_moment(k, h);
                EXPECT_NEAR(q, ref, 1e-11 * ref)
                    << "h=" << h << " n=" << n << " k=" << k;
            }
            for (double x : r.x)
            {
                EXPECT_GT(x, 0);
                EXPECT_LT(x, h);
            }
        }
    }
}

TEST(Transport, RadialGridResolvesLayer)
{
    TransportOptions o;
    for (double kn : {0.02, 0.05, 0.2, 1.0})
    {
        RadialGrid g = make_radial_grid(kn, o);
        EXPECT_EQ(g.r.front(), 0.0);
        EXPECT_EQ(g.r.back(), 1.0);
        int in_layer = 0;
        for (std::size_t i = 1; i < g.size(); ++i)
        {
            EXPECT_GT(g.r[i], g.r[i - 1]);
            if (1 - g.r[i - 1] <= kn + 1e-15)
                ++in_layer;
            if (1 - g.r[i] < 5 * kn)
                EXPECT_LE(g.r[i] - g.r[i - 1], 0.5 * kn + 1e-12);
        }
        EXPECT_GE(in_layer, 4) << kn;
    }
}

TEST(Transport, MeshVolumes)
{
    std::vector<double> edges;
    for (int i = 0; i <= 10; ++i)
        edges.push_back(0.1 * i);
    auto m3 = make_spatial_mesh(edges, 8, 16);
    EXPECT_NEAR(m3.total_volume(), 4 * std::numbers::pi / 3, 1e-12);
    EXPECT_EQ(m3.size(), 10u * 8 * 16);
    auto m2 = make_spatial_mesh(edges, 0, 16, 2);
    EXPECT_NEAR(m2.total_volume(), std::numbers::pi, 1e-12);
    EXPECT_THROW(make_spatial_mesh({0.5, 0.2}, 4, 4), ArgumentError);
}

TEST(Transport, KernelFormula)
{
    AbsorptionField zero;
    Vec3 x(0.1, 0.2, 0.3), eta(-0.2, 0.1, 0.4);
    double r = (x - eta).norm(), kn = 0.1;
    EXPECT_NEAR(kernel_E_D(x, eta, kn, zero),
                std::exp(-r / kn) / (4 * std::numbers::pi * kn * r * r), 1e-14);
    EXPECT_NEAR(kernel_E_D(x, eta, kn, zero, 2),
                std::exp(-r / kn) / (2 * std::numbers::pi * kn * r), 1e-14);
    auto bump = AbsorptionField::bump(5, 0.6);
    EXPECT_LT(kernel_E_D(x, eta, kn, bump), kernel_E_D(x, eta, kn, zero));
    EXPECT_THROW(kernel_E_D(x, x, kn, zero), DomainError);
}

TEST(Transport, KernelMassAgainstOracle)
{
    AbsorptionField zero;
    TransportOptions o;
    for (double kn : {0.05, 0.3})
        for (double r : {0.0, 0.5, 0.9, 0.99, 1.0})
        {
            double m = kernel_mass(Vec3(0, 0, r), kn, zero, o);
            EXPECT_NEAR(m, mass_oracle(r, kn), 2e-6) << kn << " " << r;
        }
}

TEST(Transport, KernelMassBoundedByOne)
{
    std::mt19937_64 rng(5);
    auto bump = AbsorptionField::bump(10, 0.6);
    AbsorptionField zero;
    TransportOptions o;
    o.n_azimuth = 8;
    for (int i = 0; i < 100; ++i)
    {
        Vec3 x = random_in_ball(rng);
        double m0 = kernel_mass(x, 0.1, zero, o);
        double m1 = kernel_mass(x, 0.1, bump, o);
        EXPECT_LE(m0, 1.0);
        EXPECT_LE(m1, m0 + 1e-15);
        EXPECT_GT(m1, 0.0);
    }
}

TEST(Transport, BoundarySourceExamples)
{
    AbsorptionField zero;
    auto one = BoundaryData::constant(3, 1.0);
    for (double kn : {0.1, 0.5})
        EXPECT_NEAR(boundary_source(one, Vec3::Zero(), kn, zero),
                    std::exp(-1 / kn), 1e-13 * std::exp(-1 / kn));
    Vec3 x(0.3, -0.2, 0.5);
    double b = boundary_source(one, x, 0.2, zero);
    EXPECT_GT(b, 0);
    EXPECT_LT(b, 1);
    // Mass identity: b_1 + kernel mass = 1 without absorption.
    EXPECT_NEAR(b + kernel_mass(x, 0.2, zero), 1.0, 1e-12);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i)
    {
        Eigen::VectorXd c = Eigen::VectorXd::Random(9);
        c[0] = 2 * std::sqrt(4 * std::numbers::pi) * c.tail(8).cwiseAbs().sum();
        BoundaryData f(3, c);
        ASSERT_GE(f.sampled_min(), 0);
        EXPECT_GE(boundary_source(f, random_in_ball(rng), 0.2, zero), 0);
    }
}

TEST(Transport, NonlocalOperatorExamples)
{
    AbsorptionField zero;
    auto bump = AbsorptionField::bump(8, 0.7);
    auto one = [](Vec3 const&) { return 1.0; };
    auto none = [](Vec3 const&) { return 0.0; };
    auto pos = [](Vec3 const& x) { return 1 + x.x() * x.x() + x.z(); };
    auto unit = BoundaryData::constant(3, 1.0);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i)
    {
        Vec3 x = random_in_ball(rng);
        EXPECT_NEAR(apply_nonlocal_L(one, x, 0.1, zero),
                    boundary_source(unit, x, 0.1, zero), 1e-12);
        EXPECT_EQ(apply_nonlocal_L(none, x, 0.1, zero), 0.0);
        EXPECT_GE(apply_nonlocal_L(pos, x, 0.1, bump),
                  apply_nonlocal_L(pos, x, 0.1, zero) - 1e-14);
    }
}

TEST(Transport, ConstantSolution)
{
    AbsorptionField zero;
    auto one = BoundaryData::constant(3, 1.0);
    for (double kn : {0.05, 0.2, 1.0})
    {
        auto sol = solve_mean_intensity(one, kn, zero);
        EXPECT_LE(sol.residual, 1e-8);
        for (double v : sol.modes.at(0).U)
            EXPECT_NEAR(v, 1.0, 1e-6);
        std::mt19937_64 rng(3);
        for (int i = 0; i < 5; ++i)
        {
            Vec3 x = random_in_ball(rng);
            EXPECT_NEAR(reconstruct_u(sol, x, random_unit(rng)), 1.0, 1e-6);
        }
    }
}

TEST(Transport, DirectAndAndersonAgree)
{
    auto bump = AbsorptionField::bump(5, 0.6);
    TransportOptions o;
    RadialGrid g = make_radial_grid(0.1, o);
    ModeSystem sys = assemble_mode_system(1, 0.1, bump, g, o);
    o.max_iter = 100000;
    ModeSolve it = solve_mode_system(sys, 0.1, o);
    EXPECT_FALSE(it.used_direct);
    o.max_iter = 1;
    ModeSolve lu = solve_mode_system(sys, 0.1, o);
    EXPECT_TRUE(lu.used_direct);
    EXPECT_LT((it.U - lu.U).cwiseAbs().maxCoeff(), 1e-8);
    o.tol = 1e-30;
    EXPECT_THROW(solve_mode_system(sys, 0.1, o), NumericalError);
}

TEST(Transport, DiscreteRowSums)
{
    // K 1 + b_0 = 1 without absorption; < 1 with it. The cubic basis allows
    // small negative entries.
    TransportOptions o;
    RadialGrid g = make_radial_grid(0.1, o);
    auto s0 = assemble_mode_system(0, 0.1, AbsorptionField(), g, o);
    auto s1 = assemble_mode_system(0, 0.1, AbsorptionField::bump(5, 0.6), g, o);
    for (Eigen::Index i = 0; i < s0.b.size(); ++i)
    {
        EXPECT_NEAR(s0.K.row(i).sum() + s0.b[i], 1.0, 1e-13);
        EXPECT_LE(s1.K.row(i).sum() + s1.b[i], 1.0 + 1e-13);
        double neg = -s1.K.row(i).cwiseMin(0.0).sum();
        EXPECT_LE(neg, 1e-2 * s1.K.row(i).sum());
    }
}

TEST(Transport, MaximumPrinciple)
{
    std::mt19937_64 rng(11);
    std::vector<double> edges;
    for (int i = 0; i <= 8; ++i)
        edges.push_back(i / 8.0);
    auto mesh = make_spatial_mesh(edges, 6, 12);
    for (int trial = 0; trial < 3; ++trial)
    {
        std::uniform_real_distribution<double> U(0.5, 10);
        auto sigma = AbsorptionField::bump(U(rng), 0.5 + 0.1 * trial);
        Eigen::VectorXd c = Eigen::VectorXd::Random(9);
        c[0] = 1.5 * std::sqrt(4 * std::numbers::pi) * c.tail(8).cwiseAbs().sum();
        BoundaryData f(3, c);
        double fmax = f.sampled_max(96), fmin = f.sampled_min(96);
        ASSERT_GE(fmin, 0);
        auto sol = solve_mean_intensity(f, 0.1, sigma, mesh);
        for (double v : sol.mesh_mean)
        {
            EXPECT_GE(v, -1e-8);
            EXPECT_LE(v, fmax + 1e-8);
        }
        auto one = solve_mean_intensity(BoundaryData::constant(3, 1), 0.1, sigma);
        for (double v : one.modes.at(0).U)
            EXPECT_LE(v, 1 + 1e-10);
    }
}

TEST(Transport, Linearity)
{
    auto sigma = AbsorptionField::bump(4, 0.6);
    Eigen::VectorXd a = Eigen::VectorXd::Random(9), b = Eigen::VectorXd::Random(9);
    auto sa = solve_mean_intensity(BoundaryData(3, a), 0.1, sigma);
    auto sb = solve_mean_intensity(BoundaryData(3, b), 0.1, sigma);
    auto sc = solve_mean_intensity(BoundaryData(3, a + 2 * b), 0.1, sigma);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i)
    {
        Vec3 x = random_in_ball(rng);
        double ref = sa.mean(x) + 2 * sb.mean(x);
        EXPECT_NEAR(sc.mean(x), ref, 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST(Transport, SelfConsistentReconstruction)
{
    // The 3D characteristic average reproduces the radial Nystrom solution.
    auto sigma = AbsorptionField::bump(4, 0.6);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(9);
    c[0] = 1;
    c[2] = 0.5;
    c[6] = -0.3;
    c[4] = 0.2;
    TransportOptions o;
    o.n_azimuth = 12;
    auto sol = solve_mean_intensity(BoundaryData(3, c), 0.1, sigma, {}, o);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 8; ++i)
    {
        Vec3 x = random_in_ball(rng, 0.98);
        auto m = reconstruct_moments(sol, x);
        EXPECT_NEAR(m.mean, sol.mean(x), 1e-4) << x.transpose();
    }
}

TEST(Transport, BoundaryTraceAndConservation)
{
    AbsorptionField zero;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[0] = 1;
    c[3] = 0.4;
    BoundaryData f(3, c);
    auto sol = solve_mean_intensity(f, 0.2, zero);
    Vec3 xb = Vec3(1, 2, -0.5).normalized();
    Vec3 v_in = (-xb + 0.3 * Vec3::UnitZ()).normalized();
    ASSERT_LT(v_in.dot(xb), 0);
    EXPECT_DOUBLE_EQ(reconstruct_u(sol, xb, v_in), f(xb));
    // No absorption: constant data carry no net flux.
    auto one = solve_mean_intensity(BoundaryData::constant(3, 1), 0.2, zero);
    EXPECT_NEAR(boundary_flux(one, xb), 0, 1e-9);
    auto m = reconstruct_moments(one, Vec3(0.2, 0.1, 0.4));
    EXPECT_LT(m.flux.norm(), 1e-9);
}

TEST(Transport, GridRefinement)
{
    auto sigma = AbsorptionField::bump(4, 0.6);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[0] = 1;
    c[2] = 0.7;
    TransportOptions coarse, fine;
    coarse.n_bulk = 24;
    fine.n_bulk = 48;
    auto a = solve_mean_intensity(BoundaryData(3, c), 0.1, sigma, {}, coarse);
    auto b = solve_mean_intensity(BoundaryData(3, c), 0.1, sigma, {}, fine);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 20; ++i)
    {
        Vec3 x = random_in_ball(rng);
        EXPECT_NEAR(a.mean(x), b.mean(x), 1.0 / 24);
    }
}

TEST(Transport, Phi1Supersolution)
{
    std::mt19937_64 rng(21);
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back(random_in_ball(rng));
    TransportOptions o;
    o.n_azimuth = 8;
    for (double kn : {0.1, 0.05})
    {
        auto rep = verify_supersolution("phi1", kn, 1, pts, AbsorptionField(), {}, o);
        EXPECT_EQ(rep.violations, 0) << kn << " margin " << rep.min_margin;
        EXPECT_EQ(rep.samples, 200);
    }
    auto c = [](Vec3 const&) { return 3.0; };
    for (int i = 0; i < 10; ++i)
        EXPECT_GE(apply_nonlocal_L(c, pts[i], 0.1, AbsorptionField::bump(5, 0.6), o),
                  0.0);
    EXPECT_EQ(phi1(Vec3::Zero()), 22.0);
    EXPECT_THROW(verify_supersolution("phi3", 0.1, 1, pts, AbsorptionField()),
                 ArgumentError);
}

TEST(Transport, Phi2CalibratedSupersolution)
{
    double kn = 0.1, A = 1;
    std::mt19937_64 rng(22);
    std::vector<Vec3> pts;
    std::uniform_real_distribution<double> D(0.5 * kn, 5 * kn);
    for (int i = 0; i < 40; ++i)
        pts.push_back((1 - D(rng)) * random_unit(rng));
    TransportOptions o;
    o.n_azimuth = 8;
    auto c = calibrate_phi2(kn, A, pts, AbsorptionField(), o);
    std::vector<Vec3> fresh;
    for (int i = 0; i < 40; ++i)
        fresh.push_back((1 - D(rng)) * random_unit(rng));
    auto rep = verify_supersolution("phi2", kn, A, fresh, AbsorptionField(), c, o);
    EXPECT_EQ(rep.violations, 0) << rep.min_margin;
}

TEST(Transport, Errors)
{
    AbsorptionField zero;
    EXPECT_THROW(solve_mean_intensity(BoundaryData::constant(2, 1), 0.1, zero),
                 UnsupportedError);
    EXPECT_THROW(solve_mean_intensity(BoundaryData::constant(3, 1), 0, zero),
                 ArgumentError);
    EXPECT_THROW(solve_mean_intensity(BoundaryData::constant(3, 1), 1.5, zero),
                 ArgumentError);
}

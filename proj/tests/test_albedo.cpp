#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "knt/albedo.hpp"
#include "knt/elliptic.hpp"
#include "knt/error.hpp"
#include "knt/quadrature.hpp"

using namespace knt;

namespace
{
BoundaryData l1_mode()
{
    return BoundaryData::mode(3, harmonic_index(3, 1, 0));
}
}  // namespace

TEST(Albedo, OperatorNormClosedForms)
{
    std::vector<int> deg{0, 1, 1, 1, 2, 2, 2, 2, 2};
    EXPECT_EQ(operator_norm(Eigen::MatrixXd::Zero(9, 9), deg, 1.0), 0.0);
    EXPECT_NEAR(operator_norm(Eigen::MatrixXd::Identity(9, 9), deg, 0.0), 1.0, 1e-14);
    Eigen::VectorXd d(9);
    d << 0.5, 3, -4, 1, 10, 2, 2, 2, 2;
    double s = 0.7, ref = 0;
    for (int k = 0; k < 9; ++k)
        ref = std::max(ref, std::abs(d[k]) * std::pow(1.0 + deg[k] * (deg[k] + 1), -s));
    EXPECT_NEAR(operator_norm(Eigen::MatrixXd(d.asDiagonal()), deg, s), ref, 1e-13);
    EXPECT_THROW(operator_norm(Eigen::MatrixXd::Zero(9, 9), deg, -1), ArgumentError);
}

TEST(Albedo, ConstantColumnVanishesWithoutAbsorption)
{
    auto A = assemble_albedo(AbsorptionField(), 0.1, 16);
    EXPECT_LE(A.M.col(0).cwiseAbs().maxCoeff(), 1e-5);
    auto v = albedo_degree_values(AbsorptionField(), 0.05, 3);
    EXPECT_NEAR(v[0], 0.0, 1e-8);
}

TEST(Albedo, RoutesAgreeAndMatrixIsDiagonal)
{
    auto bump = AbsorptionField::bump(10, 0.6);
    auto P = assemble_albedo(bump, 0.1, 16);
    auto D = assemble_albedo_modal(bump, 0.1, 16);
    ASSERT_TRUE(P.M.allFinite());
    EXPECT_LE((P.M - D.M).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::MatrixXd off = P.M;
    off.diagonal().setZero();
    EXPECT_LE(off.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((P.M - P.M.transpose()).norm(), 1e-10 * P.M.norm());
    for (int k = 0; k < 16; ++k)
        EXPECT_EQ(P.degree[k], harmonic_mode(3, k).l);
}

TEST(Albedo, ConservationOracleForDegreeZero)
{
    // int_{dD} Lambda 1 = -int_D sigma <u>, so Lambda_0 = -int sigma <u> r^2 dr.
    auto bump = AbsorptionField::bump(10, 0.6);
    for (double kn : {0.1, 0.05})
    {
        auto sol = solve_mean_intensity(BoundaryData::constant(3, 1.0), kn, bump);
        Rule1D R = composite_gauss({0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 8);
        double I = 0;
        for (std::size_t i = 0; i < R.size(); ++i)
            I += R.w[i] * bump(R.x[i]) * sol.mean(Vec3(0, 0, R.x[i])) * R.x[i] * R.x[i];
        double L0 = albedo_degree_values(bump, kn, 0)[0];
        // Default-grid discretization error, about 1e-4 at Kn = 0.05.
        EXPECT_NEAR(L0, -I, 3e-4 * I) << kn;
    }
}

TEST(Albedo, AbsorptionLowersOutgoingFlux)
{
    auto v0 = albedo_degree_values(AbsorptionField(), 0.1, 4);
    auto v1 = albedo_degree_values(AbsorptionField::bump(5, 0.6), 0.1, 4);
    auto v2 = albedo_degree_values(AbsorptionField::bump(20, 0.6), 0.1, 4);
    for (int l = 1; l <= 4; ++l)
        EXPECT_LT(v0[l], 0.0);
    for (int l = 0; l <= 4; ++l)
    {
        EXPECT_LT(v1[l], v0[l]);
        EXPECT_LT(v2[l], v1[l]);
    }
}

TEST(Albedo, LinearityAndTruncation)
{
    auto bump = AbsorptionField::bump(10, 0.6);
    auto A16 = assemble_albedo(bump, 0.2, 16);
    auto A9 = assemble_albedo(bump, 0.2, 9);
    EXPECT_LE((A16.M.topLeftCorner(9, 9) - A9.M).cwiseAbs().maxCoeff(),
              1e-4 * A9.M.cwiseAbs().maxCoeff());
    Eigen::VectorXd a = Eigen::VectorXd::Random(16), b = Eigen::VectorXd::Random(16);
    auto la = apply_albedo(A16, BoundaryData(3, a));
    auto lb = apply_albedo(A16, BoundaryData(3, b));
    auto lc = apply_albedo(A16, BoundaryData(3, 2 * a - b));
    EXPECT_LE((lc.coeffs() - 2 * la.coeffs() + lb.coeffs()).norm(), 1e-12);
    EXPECT_THROW(apply_albedo(A9, BoundaryData(3, a)), ArgumentError);
}

TEST(Albedo, AdjointMatrixIsTranspose)
{
    auto bump = AbsorptionField::bump(10, 0.6);
    auto A = assemble_albedo(bump, 0.1, 9);
    auto Ap = assemble_albedo(bump, 0.1, 9, {}, Orientation::backward);
    EXPECT_LE((Ap.M - A.M.transpose()).norm(), 1e-8 * A.M.norm());
}

TEST(Albedo, AdjointIdentity)
{
    auto bump = AbsorptionField::bump(10, 0.6);
    auto one = BoundaryData::constant(3, 1.0);
    auto z = adjoint_check(AbsorptionField(), 0.2, one, l1_mode());
    EXPECT_NEAR(z.lhs, 0.0, 1e-8);
    EXPECT_NEAR(z.rhs, 0.0, 1e-8);
    auto r = adjoint_check(bump, 0.2, l1_mode(), l1_mode());
    EXPECT_LE(r.residual, 5e-3);
    Eigen::VectorXd a = Eigen::VectorXd::Random(9), b = Eigen::VectorXd::Random(9);
    auto q = adjoint_check(bump, 0.1, BoundaryData(3, a), BoundaryData(3, b));
    EXPECT_LE(q.residual, 5e-3);
}

TEST(Albedo, WeakFormIdentity)
{
    AlbedoOptions o;
    o.transport.mu_per_panel = 3;
    o.transport.n_azimuth = 8;
    auto one = BoundaryData::constant(3, 1.0);
    auto z = weak_form_check(AbsorptionField(), 0.2, one, one, 1, o);
    EXPECT_NEAR(z.lhs, 0.0, 1e-8);
    EXPECT_NEAR(z.rhs, 0.0, 1e-8);

    auto bump = AbsorptionField::bump(10, 0.6);
    auto r1 = weak_form_check(bump, 0.2, l1_mode(), l1_mode(), 1, o);
    auto r2 = weak_form_check(bump, 0.2, l1_mode(), l1_mode(), 2, o);
    EXPECT_LE(r1.residual, 5e-3);
    EXPECT_LT(r2.residual, r1.residual);
}

TEST(Albedo, DtnLimit)
{
    auto bump = AbsorptionField::bump(10, 0.6);
    auto rows = dtn_limit_study(bump, {0.2, 0.1, 0.05, 0.025}, 2);
    auto fit = fit_dtn_limit(rows);
    // Formal limit is -C_d DtN with C_d = 1/3.
    EXPECT_NEAR(fit.normalization, -1.0 / 3, 5e-3);
    for (int l = 0; l <= 2; ++l)
        EXPECT_GE(fit.rate[l], 0.8) << l;
    for (auto const& r : rows)
        EXPECT_NEAR(r.dtn_diff, dtn_mode(r.l, bump) - r.l, 1e-6);
}

TEST(Albedo, AprioriSweep)
{
    auto zero = albedo_apriori_sweep(AbsorptionField(), l1_mode(), {0.2, 0.1});
    for (auto const& r : zero.rows)
        EXPECT_NEAR(r.lhs, 0.0, 1e-9);
    auto s = albedo_apriori_sweep(AbsorptionField::bump(10, 0.6), l1_mode(),
                                  {0.2, 0.1, 0.05});
    ASSERT_EQ(s.rows.size(), 3u);
    for (auto const& r : s.rows)
    {
        EXPECT_GT(r.C, 0.0);
        EXPECT_NEAR(r.f_norm, std::pow(3.0, 2.75), 1e-12);
        EXPECT_NEAR(r.rhs, r.rho_norm + r.kn * r.f_norm, 1e-12);
    }
    EXPECT_GE(s.spread, 1.0);
}

TEST(Albedo, Errors)
{
    EXPECT_THROW(assemble_albedo(AbsorptionField(), 0.0, 4), ArgumentError);
    EXPECT_THROW(assemble_albedo(AbsorptionField(), 1.5, 4), ArgumentError);
    EXPECT_THROW(assemble_albedo(AbsorptionField(), 0.1, 0), ArgumentError);
    EXPECT_THROW(assemble_albedo_modal(AbsorptionField::constant(1.0), 0.1, 4),
                 DomainError);
    EXPECT_THROW(weak_form_check(AbsorptionField(), 0.1, l1_mode(), l1_mode(), 0),
                 ArgumentError);
}

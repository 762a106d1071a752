#include <cmath>

#include <gtest/gtest.h>

#include "knt/error.hpp"
#include "knt/remainder.hpp"

using namespace knt;

namespace
{
BoundaryData l1_mode()
{
    return BoundaryData::mode(3, harmonic_index(3, 1, 0));
}

RemainderOptions coarse()
{
    RemainderOptions o;
    o.n_radii = 8;
    o.n_directions = 4;
    o.transport.mu_per_panel = 3;
    o.transport.n_azimuth = 8;
    return o;
}
}  // namespace

TEST(Remainder, ExpansionTermsWithoutAbsorption)
{
    auto t = expansion_terms(l1_mode(), AbsorptionField(), 0.1);
    Vec3 x(0.2, -0.3, 0.1), v(0, 0.6, 0.8);
    EXPECT_EQ(t.psi0(x), 0.0);
    EXPECT_NEAR(t.psi1(x, v), 0.0, 1e-12);
    EXPECT_NEAR(t.flux_psi1(x).norm(), 0.0, 1e-12);
}

TEST(Remainder, ExpansionMomentsMatchAngularQuadrature)
{
    auto t = expansion_terms(BoundaryData(3, Eigen::VectorXd::Random(9)),
                             AbsorptionField::bump(10, 0.6), 0.1);
    Vec3 x(0.3, 0.1, -0.4);
    auto q = graded_quadrature_about(Vec3::UnitZ(), TransportOptions{});
    double mean = 0;
    Vec3 flux = Vec3::Zero();
    for (std::size_t a = 0; a < q.size(); ++a)
    {
        double p = t.psi1(x, q.nodes[a]);
        mean += q.weights[a] * p;
        flux += q.weights[a] * p * q.nodes[a];
    }
    EXPECT_NEAR(mean, t.mean_psi1(x), 1e-10);
    EXPECT_NEAR((flux - t.flux_psi1(x)).norm(), 0.0, 1e-10);
    // psi_{a,1} averages to c_a.
    double ma = 0;
    for (std::size_t a = 0; a < q.size(); ++a)
        ma += q.weights[a] * t.psia1(x, q.nodes[a]);
    EXPECT_NEAR(ma, t.fields.ca.value(x), 1e-10);
}

TEST(Remainder, SampleSetCoversBulkAndLayer)
{
    RemainderOptions o;
    auto pts = remainder_sample_set(0.05, o);
    ASSERT_EQ(pts.size(), 20u * 32u);
    int layer = 0, bulk = 0;
    for (auto const& p : pts)
    {
        double d = 1 - p.norm();
        ASSERT_GT(d, 0.0);
        (d < 0.25 ? layer : bulk)++;
    }
    EXPECT_EQ(layer, 10 * 32);
    EXPECT_EQ(bulk, 10 * 32);
    auto again = remainder_sample_set(0.05, o);
    EXPECT_EQ((pts[17] - again[17]).norm(), 0.0);
    o.n_radii = 1;
    EXPECT_THROW(remainder_sample_set(0.05, o), ConfigError);
}

TEST(Remainder, ZeroAbsorptionGivesZeroFluxRemainder)
{
    auto run = remainder_fields(l1_mode(), AbsorptionField(), 0.1, coarse());
    EXPECT_EQ(run.vr_max, 0.0);
    for (auto const& s : run.samples)
        EXPECT_FALSE(s.flux_usable);
}

TEST(Remainder, ConstantDatumHasNoBulkGrowth)
{
    auto o = coarse();
    o.flux = false;
    auto bump = AbsorptionField::bump(10, 0.6);
    auto a = remainder_fields(BoundaryData::constant(3, 1.0), bump, 0.1, o);
    auto b = remainder_fields(BoundaryData::constant(3, 1.0), bump, 0.05, o);
    EXPECT_TRUE(std::isfinite(a.ra_bulk));
    EXPECT_LT(b.ra_bulk, 2 * a.ra_bulk);
}

TEST(Remainder, SweepIsNormalizedAndDoesNotDriftUp)
{
    auto rep = remainder_sweep(l1_mode(), AbsorptionField::bump(10, 0.6),
                               {0.2, 0.1, 0.05}, coarse());
    ASSERT_EQ(rep.runs.size(), 3u);
    EXPECT_NEAR(rep.f_norm, std::pow(3.0, 2.75), 1e-12);
    for (std::size_t i = 0; i < 3; ++i)
    {
        EXPECT_GT(rep.normalized_ra[i], 0.0);
        EXPECT_GT(rep.normalized_vr[i], 0.0);
        EXPECT_EQ(rep.runs[i].unusable, 0);
    }
    EXPECT_LE(rep.drift_ra, 0.2);
    EXPECT_LE(rep.drift_vr, 0.2);
}

TEST(Remainder, LayerProfile)
{
    for (double kn : {0.05, 0.025})
    {
        auto r = layer_profile_check(l1_mode(), kn);
        EXPECT_FALSE(r.flat);
        EXPECT_GE(r.beta, 0.4) << kn;
        EXPECT_GT(r.near_max, r.tail_max);
        EXPECT_LT(r.B, 1.0);
    }
    auto flat = layer_profile_check(BoundaryData::constant(3, 1.0), 0.05);
    EXPECT_TRUE(flat.flat);
    EXPECT_LT(flat.near_max, 1e-6);
}

TEST(Remainder, DiffusionLimitRate)
{
    auto st = diffusion_limit_study(l1_mode(), AbsorptionField(), {0.2, 0.1, 0.05});
    EXPECT_GE(st.rate, 0.8);
    for (std::size_t i = 1; i < st.rows.size(); ++i)
        EXPECT_LT(st.rows[i].error, st.rows[i - 1].error);
}

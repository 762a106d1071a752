//---------------------------------------------------------------------------//
/*!
 * \file knt/remainder.hpp
 * \brief Diffusion expansion of the transport solution and its remainders.
 *
 * With u = u_a - u_0 and psi_0 = rho_{a,0} - rho_{0,0}, the expansion is
 * u = psi_0 + Kn psi_1 + Kn^2 R and u_a = rho_{a,0} + Kn psi_{a,1} + Kn^2 R_a,
 * where psi_1 = -v . grad psi_0 + c and psi_{a,1} = -v . grad rho_{a,0} + c_a.
 * Remainders are obtained by subtraction from transport solves.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <vector>

#include "knt/elliptic.hpp"
#include "knt/transport.hpp"

namespace knt
{
//! Interior expansion evaluators at (x, v).
class ExpansionTerms
{
  public:
    double kn{0};
    ExpansionFields fields;

    double psi0(Vec3 const& x) const { return fields.psi0.value(x); }
    double psi1(Vec3 const& x, Vec3 const& v) const;
    double psia1(Vec3 const& x, Vec3 const& v) const;
    //! <psi_1> = c.
    double mean_psi1(Vec3 const& x) const { return fields.c.value(x); }
    //! <v psi_1> = -C_d grad psi_0.
    Vec3 flux_psi1(Vec3 const& x) const;
};

ExpansionTerms expansion_terms(BoundaryData const& f,
                               AbsorptionField const& sigma, double kn);

//---------------------------------------------------------------------------//
struct RemainderOptions
{
    int n_radii{20};          //!< half in the layer band, half in the bulk
    int n_directions{32};
    std::uint64_t seed{20240611};
    double band{5.0};         //!< layer band d(x) < band Kn
    bool flux{true};          //!< also reconstruct <v R> (costly)
    TransportOptions transport;
};

//! Sample positions: graded radii times seeded directions.
std::vector<Vec3> remainder_sample_set(double kn, RemainderOptions const& opts);

struct RemainderSample
{
    Vec3 x{Vec3::Zero()};
    double depth{0};  //!< 1 - |x|
    bool layer{false};
    double Ra{0};                //!< <R_a>
    Vec3 vR{Vec3::Zero()};       //!< <v R>
    bool mean_usable{true};
    bool flux_usable{true};
};

struct RemainderRun
{
    double kn{0};
    std::vector<RemainderSample> samples;
    double ra_bulk{0}, ra_layer{0}, ra_max{0};  //!< sup |<R_a>|
    double vr_bulk{0}, vr_layer{0}, vr_max{0};  //!< sup |<v R>|
    int unusable{0};
};

/*!
 * <R_a> and <v R> at the sample set for one Kn.
 *
 * A sample is unusable when |numerator| < 10 tol max(1, |value|), with the
 * numerator the transport quantity minus its expansion before division by
 * Kn^2; unusable samples are excluded from the sup norms.
 */
RemainderRun remainder_fields(BoundaryData const& f, AbsorptionField const& sigma,
                              double kn, RemainderOptions const& opts = {});

struct RemainderReport
{
    std::vector<RemainderRun> runs;
    int s0{4};
    double s1{5.5};
    double rho_norm{0};  //!< ||rho00||_{H^{s0}(K)}
    double f_norm{0};    //!< ||f||_{H^{s1}}
    //! Kn^2 ||<R_a>|| / (rho_norm + Kn f_norm) per run.
    std::vector<double> normalized_ra;
    //! Kn ||<v R>|| / (rho_norm + Kn f_norm) per run.
    std::vector<double> normalized_vr;
    double drift_ra{0}, drift_vr{0};    //!< log-log slope against 1/Kn
    double spread_ra{0}, spread_vr{0};  //!< max / min
};

RemainderReport remainder_sweep(BoundaryData const& f,
                                AbsorptionField const& sigma,
                                std::vector<double> const& kn_list,
                                RemainderOptions const& opts = {});

//---------------------------------------------------------------------------//
struct LayerBin
{
    double z{0};      //!< representative d/Kn
    double value{0};  //!< max |<R_0>| in the bin
    int count{0};
};

struct LayerProfileReport
{
    double kn{0};
    std::vector<LayerBin> bins;
    double A{0}, beta{0}, B{0};  //!< fit A exp(-beta z)/Kn + B
    double near_max{0};          //!< max over z <= 2
    double tail_max{0};          //!< max over z > 10 (0 if none)
    bool flat{false};            //!< fewer than three bins above noise; no fit
};

/*!
 * Zero-absorption remainder <R_0> = (<u_0> - rho00 - Kn c0)/Kn^2 binned by
 * d/Kn; the noise floor is 10 tol / Kn^2. Raises ConfigError if fewer
 * than four sampled bins lie in the layer band.
 */
LayerProfileReport layer_profile_check(BoundaryData const& f, double kn,
                                       RemainderOptions const& opts = {});

//---------------------------------------------------------------------------//
struct DiffusionRow
{
    double kn{0};
    double error{0};  //!< sup over samples in K of |<u> - rho|
};

struct DiffusionStudy
{
    std::vector<DiffusionRow> rows;
    double rate{0};
};

/*!
 * Interior error of <u> against the elliptic limit rho (rho00 when sigma is
 * zero) on the ball of radius r_K.
 */
DiffusionStudy diffusion_limit_study(BoundaryData const& f,
                                     AbsorptionField const& sigma,
                                     std::vector<double> const& kn_list,
                                     double r_K = 0.5,
                                     RemainderOptions const& opts = {});

}  // namespace knt

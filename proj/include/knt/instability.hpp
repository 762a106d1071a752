//---------------------------------------------------------------------------//
/*!
 * \file knt/instability.hpp
 * \brief Covering numbers, entropy bounds from singular values, and the
 *        lower bound on the modulus of continuity of the inverse problem.
 *
 * Balls B_t are open, so a point is covered when its distance to a center
 * is strictly below t. Counts over spectra use weak inequalities.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "knt/absorption.hpp"
#include "knt/albedo.hpp"
#include "knt/fit.hpp"

namespace knt
{
//! Nonincreasing positive finite values tau_1 >= tau_2 >= ...
class SingularSpectrum
{
  public:
    SingularSpectrum() = default;
    //! Throws ArgumentError unless sorted, positive and finite.
    explicit SingularSpectrum(std::vector<double> values,
                              std::string descriptor = "explicit");

    //! sigma_k = k^{-nu}, k = 1..n.
    static SingularSpectrum polynomial(double nu, std::size_t n);
    //! sigma_k = exp(-k^mu), k = 1..n.
    static SingularSpectrum exponential(double mu, std::size_t n);

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    double operator[](std::size_t k) const { return values_[k]; }
    std::vector<double> const& values() const { return values_; }
    std::string const& descriptor() const { return descriptor_; }

  private:
    std::vector<double> values_;
    std::string descriptor_{"empty"};
};

//---------------------------------------------------------------------------//
// Covering numbers
//---------------------------------------------------------------------------//

//! Centers (column indices) of the farthest-point greedy t-net.
std::vector<std::size_t> greedy_net(Eigen::MatrixXd const& points, double t);

/*!
 * Size of the farthest-point greedy net of the columns of \c points.
 *
 * The centers are pairwise at distance >= t and cover every point at
 * distance < t, so N(K, t) <= N_g <= N(K, t/2).
 */
std::size_t greedy_cover(Eigen::MatrixXd const& points, double t);

//! vol(K)/vol(B_t) and vol(K + B_{t/2})/vol(B_{t/2}) for the unit square.
struct VolumeBounds
{
    double lower{0};
    double upper{0};
};
VolumeBounds unit_square_volume_bounds(double t);

struct EntropyBounds
{
    double lower{0};  //!< sum over sigma_k >= 2t of log(sigma_k / t)
    double upper{0};  //!< m2 log 12 + sum over sigma_k >= t/3 of log(sigma_k / t)
    std::size_t m1{0};
    std::size_t m2{0};
};

//! Bounds on log N(E, t) for the ellipsoid with semi-axes sigma.
EntropyBounds entropy_bounds_from_spectrum(SingularSpectrum const& sigma,
                                           double t);

struct SandwichOptions
{
    std::size_t n_samples{20000};
    std::uint64_t seed{7};
    std::size_t max_centers{4000};  //!< greedy budget per radius
};

struct SandwichReport
{
    std::vector<double> axes;
    double t{0};
    EntropyBounds bounds;
    std::size_t n_t{0};       //!< greedy count at radius t
    std::size_t n_half{0};    //!< greedy count at radius t/2
    double log_n_t{0};
    double log_n_half{0};
    double slack{0};          //!< m log 2
    bool lower_ok{false};     //!< lower(t) <= log N_g(t/2)
    bool upper_ok{false};     //!< log N_g(t) <= upper(t) + slack
    bool partial{false};      //!< greedy budget exhausted
    bool passed() const { return lower_ok && upper_ok && !partial; }
};

/*!
 * Monte-Carlo check of the entropy sandwich on an ellipsoid of dimension
 * m <= 4, with the greedy counts at t and t/2 bracketing log N.
 */
SandwichReport sandwich_validation(std::vector<double> const& axes, double t,
                                   SandwichOptions const& opts = {});

//! Uniform samples from the ellipsoid with the given semi-axes (columns).
Eigen::MatrixXd sample_ellipsoid(std::vector<double> const& axes,
                                 std::size_t n, std::uint64_t seed);

//---------------------------------------------------------------------------//
// Comparison operator bound
//---------------------------------------------------------------------------//

struct ComparisonOptions
{
    double C{1.0};           //!< universal constant of the bound
    double iota_norm{0.0};   //!< ||iota||; 0 selects max_{k,j} sigma_{k,j}
};

struct ComparisonBound
{
    double C{1};
    double C_tau{0};         //!< sum of tau_k^{1/2} over the given values
    double tail_estimate{0}; //!< power-law extrapolation of the omitted sum
    double iota_norm{0};
    double threshold{0};     //!< t / (3 C_tau)
    std::size_t m{0};        //!< #{(k, j) : tau_k^{1/4} tau_j^{1/4} >= threshold}
    std::size_t g_count{0};  //!< #{k : tau_k^{1/4} >= threshold}
    bool g_valid{false};     //!< tau_1 <= 1, so that m <= g_count^2
    double log_bound{0};     //!< C m (1 + log(C_tau ||iota|| / t))
    double log_bound_g{0};   //!< same with g_count^2 in place of m
};

/*!
 * Upper bound on log N for the comparison operator built from a majorant
 * of the singular values. Raises PreconditionError when the tail of the
 * spectrum decays too slowly for sum tau_k^{1/2} to converge.
 */
ComparisonBound comparison_upper_bound(SingularSpectrum const& tau, double t,
                                       ComparisonOptions const& opts = {});

//---------------------------------------------------------------------------//
// Singular values of sums
//---------------------------------------------------------------------------//

struct SumPropertyReport
{
    int trials{0};
    long checks{0};
    int violations{0};       //!< excess beyond 1e-10
    double max_excess{0};    //!< max of sigma_{i+j-1}(A) - sigma_i(A1) - sigma_j(A2)
};

/*!
 * Random test of sigma_{i+j-1}(A) <= sigma_i(A1) + sigma_j(A2) for the
 * stacked A = [A1; A2] (so ||A f|| <= ||A1 f|| + ||A2 f||). Sizes <= 40.
 */
SumPropertyReport singular_sum_property(int trials, int rows1, int rows2,
                                        int cols, std::uint64_t seed = 11,
                                        bool zero_second = false);

//---------------------------------------------------------------------------//
// Non-negativity constraint
//---------------------------------------------------------------------------//

struct NonnegCover
{
    int m{0};
    double t{0};
    double lower{0};         //!< 2^{-m} t^{-m}
    std::size_t greedy{0};   //!< greedy witness on sampled orthant points
    bool holds() const { return lower <= static_cast<double>(greedy); }
};

//! Covering of the nonnegative part of the unit ball in dimension m <= 6.
NonnegCover nonneg_cover_lower(int m, double t, std::size_t n_samples = 20000,
                               std::uint64_t seed = 5);

//---------------------------------------------------------------------------//
// Modulus of continuity
//---------------------------------------------------------------------------//

/*!
 * Exponent convention for the Kn factor of the Hölder branch.
 *
 * The stated bound carries Kn^{-gamma/(s-s1)}; composing g^2 with the
 * power -gamma/d produces Kn^{-2 gamma/(s-s1)}. Both are available.
 */
enum class KnExponent
{
    stated,
    composed
};

struct ModulusParams
{
    int d{3};
    double gamma{5};
    double s{18};
    double s1{5.5};  //!< 9/2 + floor(d/2)
    double kn{1e-4};
    double C1{1}, C2{1}, C3{1};
    KnExponent kn_exponent{KnExponent::stated};
};

//! Raises ConfigError naming every failed hypothesis.
void validate_modulus_params(ModulusParams const& p);

enum class Regime
{
    holder,
    logarithmic
};

char const* to_string(Regime r);

struct ModulusValue
{
    double omega{0};
    double holder{0};  //!< C1 Kn^{-a gamma/(s-s1)} t^{8 gamma/(s-s1)} times the log factor
    double log{0};     //!< C1 |log C2 t|^{-2 gamma} times the log factor
    Regime regime{Regime::holder};
};

/*!
 * Lower bound on the modulus of continuity at t, the minimum of the two
 * branches times (1 + |log C3 t|)^{-gamma/d}. Needs 0 < t < min(1/C2, 1/C3).
 */
ModulusValue modulus_lower_bound(double t, ModulusParams const& p);

/*!
 * Same bound assembled from g, the inverse of the decay profile of the
 * singular values, with mu = 1/d and nu = (s - s1)/d, raised to -1/alpha
 * with alpha = d/gamma.
 */
double modulus_lower_bound_via_g(double t, ModulusParams const& p);

struct ModulusCurve
{
    ModulusParams params;
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<Regime> regime;
};

//! Log-spaced curve on [t_min, t_max].
ModulusCurve modulus_curve(ModulusParams const& p, double t_min, double t_max,
                           int n);

struct TransitionRow
{
    double kn{0};
    double t_star{0};
    bool found{false};
    std::string note;
};

struct TransitionStudy
{
    std::vector<TransitionRow> rows;
    //! Slope of log t* + ((s-s1)/4) log|log C2 t*| against log Kn.
    double beta{0};
    //! Slope of log t* against log Kn (log factors included).
    double beta_raw{0};
    //! beta on each window of consecutive Kn values spanning one decade.
    std::vector<double> window_beta;
    double beta_spread{0};
    bool increasing{false};
};

//! Smaller root of the branch equality, by bisection in log t.
TransitionRow crossover_point(ModulusParams const& p);

/*!
 * Crossover t* of the two branches per Kn (the smaller root of the branch
 * equality, by bisection in log t) and the fitted exponent of t* ~ Kn^beta.
 */
TransitionStudy transition_study(std::vector<double> const& kn_list,
                                 ModulusParams const& p);

//---------------------------------------------------------------------------//
// Singular values of albedo differences
//---------------------------------------------------------------------------//

//! Singular values of W (A1 - A2) W, W = diag((1 + l(l+1))^{-s/2}).
std::vector<double> weighted_difference_svd(AlbedoMatrix const& A1,
                                            AlbedoMatrix const& A2, double s);

struct SvdStudyOptions
{
    int max_degree{12};
    double s{0.5};
    double floor{1e-13};
    //! Values are kept while the refined run agrees within this fraction.
    double agreement{0.1};
    TransportOptions transport;
    TransportOptions refined;  //!< resolution check; defaults to doubled rules
};

SvdStudyOptions default_svd_options();

struct SvdRun
{
    double kn{0};
    std::vector<double> values;   //!< all singular values, nonincreasing
    std::vector<double> refined;  //!< same at refined resolution
    std::size_t usable{0};        //!< leading values above floor and resolved
    bool truncated{false};
    //! Block points k = (l+1)^2, tau at index k - 1.
    std::vector<double> block_k, block_tau;
    LineFit head;                 //!< log tau against k^{1/d}
    LineFit tail;                 //!< log tau against log k
    double head_curvature{0};     //!< quadratic coefficient on log-log
    bool head_concave{false};
    bool has_tail{false};
    std::size_t crossover{0};     //!< k of the first tail block
};

struct SvdStudy
{
    std::vector<SvdRun> runs;
    //! Geometric mean of tau(Kn_0)/tau(Kn_1) over blocks past the earlier
    //! crossover of the first two runs.
    double tail_ratio{0};
    double kn_ratio{0};
    bool crossover_increasing{false};
    //! Empirical tail exponent nu (first run) and the gap s - s1 it implies
    //! under nu = (s - s1)/d and under nu = (s - s1)/(d - 1).
    double tail_exponent{0};
    double gap_volume{0}, gap_boundary{0};
};

SvdStudy albedo_svd_study(AbsorptionField const& sigma1,
                          AbsorptionField const& sigma2,
                          std::vector<double> const& kn_list,
                          SvdStudyOptions const& opts = default_svd_options());

//! Head/tail analysis of one spectrum (exposed for testing).
void analyze_spectrum(SvdRun& run, int d = 3);

}  // namespace knt

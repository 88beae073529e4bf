#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace spinmarket {

/// One (alpha, statistic) sample backing a curve fit.
struct CurvePoint {
    double alpha = 0.0;
    double value = 0.0;
    std::int64_t n_cycles = 0;
};

/// Natural cubic interpolating spline: passes through every knot, C^2 inside
/// the knot range, second derivative zero at both end knots.
class CubicSpline {
public:
    /// Requires >= 3 strictly increasing knots; tridiagonal solve for the
    /// interior second derivatives.
    static CubicSpline fit(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;
    double second_derivative(double x) const;

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    CubicSpline() = default;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at knots, m front/back = 0
};

CubicSpline fit_spline(std::span<const CurvePoint> points);

enum class ExtremumKind { Min, Max };

struct ExtremumEstimate {
    double location = 0.0;
    double value = 0.0;
    ExtremumKind kind = ExtremumKind::Min;
    bool interior = false;  // strictly inside the knot range
};

/// Dense grid scan (step 1e-3 in alpha) over the knot range, then
/// golden-section refinement of the bracketing interval to 1e-6. Ties break
/// toward smaller alpha. Min and Max share one code path (Max minimizes -f).
ExtremumEstimate find_extremum(const CubicSpline& model, ExtremumKind kind);

struct CriticalPointSummary {
    struct Minimum {
        double beta = 0.0;
        int side = 0;
        double location = 0.0;
    };
    std::vector<Minimum> minima;
    double mean = 0.0;
    double half_width = 0.0;
    double confidence = 0.0;
};

/// Mean of the per-(beta, side) minima with a Student-t confidence half-width
/// (n-1 degrees of freedom). Requires >= 2 minima.
CriticalPointSummary aggregate_minima(
    std::vector<CriticalPointSummary::Minimum> minima, double confidence);

struct PowerLawFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of ln(value) on ln(beta); exponent is the slope.
/// All inputs must be positive; >= 2 pairs required.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs);

/// exp(log_prefactor_large - log_prefactor_small).
double prefactor_ratio(const PowerLawFit& fit_large,
                       const PowerLawFit& fit_small);

/// Student-t quantile, P(T_dof <= t) = p. Bisection on the CDF via the
/// regularized incomplete beta function; accurate to ~1e-12.
double student_t_quantile(double p, int dof);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace spinmarket

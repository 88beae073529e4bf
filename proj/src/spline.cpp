#include "spinmarket/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinmarket {

CubicSpline CubicSpline::fit(std::span<const double> x,
                             std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("spline: x and y sizes differ");
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw std::invalid_argument("spline: need at least 3 points");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument(
                "spline: knots must be strictly increasing and distinct");
        }
    }

    CubicSpline s;
    s.x_.assign(x.begin(), x.end());
    s.y_.assign(y.begin(), y.end());
    s.m_.assign(n, 0.0);

    // Thomas solve for interior second derivatives, natural end conditions.
    const std::size_t interior = n - 2;
    std::vector<double> diag(interior), upper(interior), rhs(interior);
    for (std::size_t i = 0; i < interior; ++i) {
        const double h0 = x[i + 1] - x[i];
        const double h1 = x[i + 2] - x[i + 1];
        diag[i] = (h0 + h1) / 3.0;
        upper[i] = h1 / 6.0;
        rhs[i] = (y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0;
    }
    for (std::size_t i = 1; i < interior; ++i) {
        const double lower = (x[i + 1] - x[i]) / 6.0;
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (interior > 0) {
        s.m_[interior] = rhs[interior - 1] / diag[interior - 1];
        for (std::size_t i = interior - 1; i > 0; --i) {
            s.m_[i] = (rhs[i - 1] - upper[i - 1] * s.m_[i + 1]) / diag[i - 1];
        }
    }
    return s;
}

namespace {

std::size_t interval_index(const std::vector<double>& knots, double x) {
    // Clamped search; evaluation outside the range extrapolates the end cubic.
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t i = (it == knots.begin()) ? 0 : (it - knots.begin() - 1);
    return std::min(i, knots.size() - 2);
}

}  // namespace

double CubicSpline::operator()(double x) const {
    const std::size_t i = interval_index(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) /
               6.0;
}

double CubicSpline::second_derivative(double x) const {
    const std::size_t i = interval_index(x_, x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

CubicSpline fit_spline(std::span<const CurvePoint> points) {
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& p : points) {
        x.push_back(p.alpha);
        y.push_back(p.value);
    }
    return CubicSpline::fit(x, y);
}

namespace {

constexpr double kGridStep = 1e-3;
constexpr double kRefineTol = 1e-6;

double golden_section_min(const auto& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ExtremumEstimate find_extremum(const CubicSpline& model, ExtremumKind kind) {
    const double lo = model.knots().front();
    const double hi = model.knots().back();
    const double sign = (kind == ExtremumKind::Min) ? 1.0 : -1.0;
    const auto g = [&](double x) { return sign * model(x); };

    const auto n_steps =
        static_cast<std::size_t>(std::ceil((hi - lo) / kGridStep));
    double best_x = lo;
    double best_g = g(lo);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double x = std::min(lo + static_cast<double>(k) * kGridStep, hi);
        const double gx = g(x);
        if (gx < best_g) {  // strict: ties stay at the smaller alpha
            best_g = gx;
            best_x = x;
        }
    }

    const double bracket_lo = std::max(lo, best_x - kGridStep);
    const double bracket_hi = std::min(hi, best_x + kGridStep);
    const double refined =
        golden_section_min(g, bracket_lo, bracket_hi, kRefineTol);

    ExtremumEstimate est;
    est.location = (g(refined) < best_g) ? refined : best_x;
    est.value = model(est.location);
    est.kind = kind;
    est.interior =
        (est.location - lo > kGridStep) && (hi - est.location > kGridStep);
    return est;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Continued fraction converges fastest for x below the mean; mirror
    // otherwise via I_x(a,b) = 1 - I_{1-x}(b,a).
    if (x > (a + 1.0) / (a + b + 2.0)) {
        return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
    }
    const double log_front = a * std::log(x) + b * std::log1p(-x) -
                             std::log(a) -
                             (std::lgamma(a) + std::lgamma(b) -
                              std::lgamma(a + b));
    // Modified Lentz evaluation of the standard continued fraction.
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double dm = static_cast<double>(m);
        double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + dm) * (a + b + dm) * x /
              ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return std::exp(log_front) * h;
}

namespace {

double student_t_cdf(double t, int dof) {
    const double v = static_cast<double>(dof);
    const double x = v / (v + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(v / 2.0, 0.5, x);
    return (t >= 0.0) ? 1.0 - tail : tail;
}

}  // namespace

double student_t_quantile(double p, int dof) {
    if (dof < 1) {
        throw std::invalid_argument("student_t_quantile: dof must be >= 1");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("student_t_quantile: p must be in (0,1)");
    }
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, dof);

    double lo = 0.0, hi = 1.0;
    while (student_t_cdf(hi, dof) < p && hi < 1e100) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-14 * std::max(1.0, lo)) break;
    }
    return 0.5 * (lo + hi);
}

CriticalPointSummary aggregate_minima(
    std::vector<CriticalPointSummary::Minimum> minima, double confidence) {
    const std::size_t n = minima.size();
    if (n < 2) {
        throw std::invalid_argument(
            "aggregate_minima: need at least 2 minima locations");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument(
            "aggregate_minima: confidence must be in (0,1)");
    }
    double mean = 0.0;
    for (const auto& m : minima) mean += m.location;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& m : minima) {
        const double d = m.location - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double t =
        student_t_quantile(0.5 * (1.0 + confidence), static_cast<int>(n) - 1);

    CriticalPointSummary summary;
    summary.minima = std::move(minima);
    summary.mean = mean;
    summary.half_width = t * sd / std::sqrt(static_cast<double>(n));
    summary.confidence = confidence;
    return summary;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 2) {
        throw std::invalid_argument("fit_power_law: need at least 2 pairs");
    }
    std::vector<double> lx, ly;
    lx.reserve(pairs.size());
    ly.reserve(pairs.size());
    for (const auto& [b, v] : pairs) {
        if (!(b > 0.0) || !(v > 0.0)) {
            throw std::invalid_argument(
                "fit_power_law: inputs must be strictly positive");
        }
        lx.push_back(std::log(b));
        ly.push_back(std::log(v));
    }
    const double n = static_cast<double>(pairs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_power_law: all beta values identical");
    }

    PowerLawFit fit;
    fit.exponent = sxy / sxx;
    fit.log_prefactor = my - fit.exponent * mx;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = ly[i] - (fit.log_prefactor + fit.exponent * lx[i]);
            ss_res += r * r;
        }
        fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    } else {
        fit.r_squared = 1.0;  // zero-variance response, exactly fit by slope 0
    }
    return fit;
}

double prefactor_ratio(const PowerLawFit& fit_large,
                       const PowerLawFit& fit_small) {
    return std::exp(fit_large.log_prefactor - fit_small.log_prefactor);
}

}  // namespace spinmarket

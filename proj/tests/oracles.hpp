#pragma once

// Independent reference computations for the tests: closed forms evaluated
// directly and adaptive quadrature, never the library's own special functions.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "lsero/landslide.hpp"

namespace oracle {

/// Closed-form inverse-gamma density, evaluated without logarithms.
inline double pdf_direct(double rho, double a, double s, double area) {
    const double t = a / (area - s);
    return std::pow(t, rho + 1.0) * std::exp(-t) / (a * std::tgamma(rho));
}

/// Integral of `f(A)` over A in (s + a/t_hi, s + a/t_lo) under the substitution
/// t = a/(A - s), split at t = 1 so each piece has one awkward endpoint.
template <typename F>
double integrate_t(const lsero::InverseGammaParams& p, F&& f, double t_lo, double t_hi) {
    auto g = [&](double t) {
        // beyond t = 1e4 the integrand t^(rho-1) e^(-t) is far below double range
        if (t <= 0.0 || t > 1e4) {
            return 0.0;
        }
        const double area = p.s + p.a / t;
        if (!std::isfinite(area) || !(area > p.s)) {
            return 0.0;
        }
        const double v = f(area);
        // v underflows to 0 before a/t^2 overflows
        return v == 0.0 ? 0.0 : v * (p.a / t) / t;
    };
    double total = 0.0;
    const double mid = std::clamp(1.0, t_lo, t_hi);
    if (t_lo < mid) {
        boost::math::quadrature::tanh_sinh<double> ts;
        total += ts.integrate(g, t_lo, mid, 1e-13);
    }
    if (mid < t_hi) {
        if (std::isinf(t_hi)) {
            boost::math::quadrature::exp_sinh<double> es;
            total += es.integrate(g, mid, t_hi, 1e-13);
        } else {
            boost::math::quadrature::tanh_sinh<double> ts;
            total += ts.integrate(g, mid, t_hi, 1e-13);
        }
    }
    return total;
}

/// Integral of the library pdf over (lo, hi), lo >= s.
inline double pdf_mass(const lsero::InverseGammaParams& p, double lo, double hi) {
    const double t_lo = std::isinf(hi) ? 0.0 : p.a / (hi - p.s);
    const double t_hi = lo <= p.s ? std::numeric_limits<double>::infinity() : p.a / (lo - p.s);
    return integrate_t(p, [&p](double area) { return lsero::pdf(p, area); }, t_lo, t_hi);
}

/// Integral of the direct closed-form density over (lo, hi).
inline double direct_mass(const lsero::InverseGammaParams& p, double lo, double hi) {
    const double t_lo = std::isinf(hi) ? 0.0 : p.a / (hi - p.s);
    const double t_hi = lo <= p.s ? std::numeric_limits<double>::infinity() : p.a / (lo - p.s);
    return integrate_t(p, [&p](double area) { return pdf_direct(p.rho, p.a, p.s, area); }, t_lo, t_hi);
}

/// Numerical argmax of the library pdf: a log-spaced scan brackets the peak,
/// then the root of the symmetric log-difference log p(A(1+h)) - log p(A(1-h))
/// is refined by TOMS 748. The bias of the symmetric difference is O(h^2).
inline double argmax_pdf(const lsero::InverseGammaParams& p) {
    const double lo = p.s > 0.0 ? p.s * (1.0 + 1e-9) : 1e-12;
    double best = lo;
    double best_v = -1.0;
    const int n = 20000;
    for (int k = 0; k <= n; ++k) {
        const double area = lo * std::pow(1e3 / lo, static_cast<double>(k) / n);
        if (!(area > p.s)) {
            continue;
        }
        const double v = lsero::pdf(p, area);
        if (v > best_v) {
            best_v = v;
            best = area;
        }
    }
    const double h = 1e-5;
    auto g = [&p, h](double area) {
        return std::log(lsero::pdf(p, area * (1.0 + h))) - std::log(lsero::pdf(p, area * (1.0 - h)));
    };
    double a = best;
    double b = best;
    while (g(a) <= 0.0) {
        a *= 0.999;
    }
    while (g(b) >= 0.0) {
        b *= 1.001;
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

inline double s_moore_burch(double deg) { return std::pow(std::sin(deg * std::numbers::pi / 180.0) / 0.0896, 1.3); }
inline double s_nearing(double deg) { return -1.5 + 17.0 / (1.0 + std::exp(2.3 - 6.1 * std::sin(deg * std::numbers::pi / 180.0))); }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace oracle

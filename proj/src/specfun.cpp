#include "starscat/specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>

namespace starscat {

namespace {

const bool g_handler_off = [] {
    gsl_set_error_handler_off();
    return true;
}();

void check_domain(CylinderKind kind, double x) {
    if (kind == CylinderKind::BesselJ) {
        if (x < 0.0) throw DomainError("BesselJ requires x >= 0");
    } else if (x <= 0.0) {
        throw DomainError("BesselY/Hankel1 require x > 0");
    }
}

double gsl_value(const gsl_sf_result& res, int status, const char* what) {
    if (status == GSL_EOVRFLW) throw OverflowError(what);
    if (status == GSL_EUNDRFLW) return 0.0;
    if (status != GSL_SUCCESS) throw Error(std::string(what) + ": " + gsl_strerror(status));
    return res.val;
}

// Reflection-aware J_m / Y_m for any integer order.
double bessel_j(int m, double x) {
    gsl_sf_result res;
    const int am = std::abs(m);
    const int status = gsl_sf_bessel_Jn_e(am, x, &res);
    const double v = gsl_value(res, status, "BesselJ");
    return (m < 0 && (am & 1)) ? -v : v;
}

double bessel_y(int m, double x) {
    gsl_sf_result res;
    const int am = std::abs(m);
    const int status = gsl_sf_bessel_Yn_e(am, x, &res);
    const double v = gsl_value(res, status, "BesselY");
    return (m < 0 && (am & 1)) ? -v : v;
}

}  // namespace

double eval(CylinderFn fn, double x) {
    if (std::abs(fn.order) > 200) throw ParameterError("order capped at |m| <= 200");
    check_domain(fn.kind, x);
    switch (fn.kind) {
        case CylinderKind::BesselJ:
            return bessel_j(fn.order, x);
        case CylinderKind::BesselY:
            return bessel_y(fn.order, x);
        default:
            throw ParameterError("Hankel1 is complex-valued; use eval_complex");
    }
}

Complex eval_complex(CylinderFn fn, double x) {
    if (fn.kind == CylinderKind::Hankel1) {
        check_domain(fn.kind, x);
        return {bessel_j(fn.order, x), bessel_y(fn.order, x)};
    }
    return {eval(fn, x), 0.0};
}

double eval_derivative(CylinderFn fn, double x) {
    // C'_m = (C_{m-1} - C_{m+1}) / 2
    const CylinderFn lo{fn.order - 1, fn.kind};
    const CylinderFn hi{fn.order + 1, fn.kind};
    return 0.5 * (eval(lo, x) - eval(hi, x));
}

Complex eval_derivative_complex(CylinderFn fn, double x) {
    const CylinderFn lo{fn.order - 1, fn.kind};
    const CylinderFn hi{fn.order + 1, fn.kind};
    return 0.5 * (eval_complex(lo, x) - eval_complex(hi, x));
}

void bessel_j_array(int mmax, double x, double* out) {
    check_domain(CylinderKind::BesselJ, x);
    if (x == 0.0) {
        out[0] = 1.0;
        for (int m = 1; m <= mmax; ++m) out[m] = 0.0;
        return;
    }
    const int status = gsl_sf_bessel_Jn_array(0, mmax, x, out);
    if (status != GSL_SUCCESS) {
        for (int m = 0; m <= mmax; ++m) out[m] = bessel_j(m, x);
    }
}

void bessel_y_array(int mmax, double x, double* out) {
    check_domain(CylinderKind::BesselY, x);
    const int status = gsl_sf_bessel_Yn_array(0, mmax, x, out);
    if (status != GSL_SUCCESS) {
        for (int m = 0; m <= mmax; ++m) out[m] = bessel_y(m, x);
    }
}

void hankel1_array(int mmax, double x, Complex* out) {
    std::vector<double> j(mmax + 1), y(mmax + 1);
    bessel_j_array(mmax, x, j.data());
    bessel_y_array(mmax, x, y.data());
    for (int m = 0; m <= mmax; ++m) out[m] = {j[m], y[m]};
}

FieldSample outgoing_source(int m, double kappa, Vec2 r, Vec2 r_src) {
    const Vec2 d = r - r_src;
    const double R = norm(d);
    if (R == 0.0) throw SingularityError("outgoing_source evaluated at its singular point");
    const double phi = std::atan2(d.y, d.x);
    const Complex ang = std::polar(1.0, m * phi);
    const CylinderFn H{m, CylinderKind::Hankel1};
    const Complex h = eval_complex(H, kappa * R);
    const Complex dh = eval_derivative_complex(H, kappa * R);
    // grad = e_R * kappa*H' * ang + e_phi * (i*m/R)*H * ang
    const double cphi = d.x / R, sphi = d.y / R;
    const Complex radial = kappa * dh * ang;
    const Complex angular = Complex(0.0, m / R) * h * ang;
    FieldSample out;
    out.value = h * ang;
    out.gradient = {radial * cphi - angular * sphi, radial * sphi + angular * cphi};
    return out;
}

FieldSample plane_wave(double kappa, Vec2 r) {
    const Complex v = std::polar(1.0, kappa * r.x);
    return {v, {Complex(0.0, kappa) * v, Complex(0.0, 0.0)}};
}

int truncation_order(double kappa, double r_max) {
    if (kappa <= 0.0 || r_max <= 0.0) throw ParameterError("truncation_order requires kappa, r_max > 0");
    return static_cast<int>(std::ceil(3.0 * kappa * r_max));
}

}  // namespace starscat

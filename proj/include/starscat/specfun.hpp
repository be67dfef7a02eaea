#pragma once

#include <array>
#include <vector>

#include "starscat/common.hpp"

namespace starscat {

enum class CylinderKind { BesselJ, BesselY, Hankel1 };

struct CylinderFn {
    int order = 0;
    CylinderKind kind = CylinderKind::BesselJ;
};

// Pressure-amplitude sample with its exact Cartesian gradient.
struct FieldSample {
    Complex value;
    std::array<Complex, 2> gradient;
};

// Real-valued cylinder functions (BesselJ / BesselY).  Hankel1 is complex;
// use eval_complex for it.
double eval(CylinderFn fn, double x);
double eval_derivative(CylinderFn fn, double x);

Complex eval_complex(CylinderFn fn, double x);
Complex eval_derivative_complex(CylinderFn fn, double x);

// J_0..J_mmax(x) / Y_0..Y_mmax(x) / H_0..H_mmax(x) in one call.
void bessel_j_array(int mmax, double x, double* out);
void bessel_y_array(int mmax, double x, double* out);
void hankel1_array(int mmax, double x, Complex* out);

// H_m(kappa*|r - r_src|) * exp(i*m*angle(r - r_src)) with gradient.
FieldSample outgoing_source(int m, double kappa, Vec2 r, Vec2 r_src);

// exp(i*kappa*x) with gradient.
FieldSample plane_wave(double kappa, Vec2 r);

// mu = ceil(3 * kappa * r_max)
int truncation_order(double kappa, double r_max);

}  // namespace starscat

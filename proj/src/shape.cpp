#include "starscat/shape.hpp"

#include <algorithm>
#include <cmath>

namespace starscat {

namespace {

double wrap_angle(double t, double lo, double span) {
    double w = std::fmod(t - lo, span);
    if (w < 0) w += span;
    return w + lo;
}

}  // namespace

FiberBranch StarShape::make_branch(double theta, double z) const {
    const double rho_v = rho(theta, z);
    const double rt = drho_dtheta(theta, z);
    const double s = std::sqrt(1.0 + (rt / rho_v) * (rt / rho_v));
    const double dz = drho_dz(theta, z);
    FiberBranch b;
    b.z = z;
    b.grad_z_magnitude = s / std::abs(dz);
    b.density = density(z);
    return b;
}

std::vector<FiberBranch> StarShape::fiber_solve(double theta, double r) const {
    // Bracket roots of rho(theta, .) - r on a 64-interval z-grid, bisect, then
    // polish once with Newton.
    constexpr int kSamples = 64;
    const double lo = z_lo(), hi = z_hi();
    std::vector<FiberBranch> out;
    if (!(r > r_min() && r < r_max())) return out;
    auto g = [&](double z) { return rho(theta, z) - r; };
    double z0 = lo, g0 = g(z0);
    for (int k = 1; k <= kSamples; ++k) {
        const double z1 = lo + (hi - lo) * k / kSamples;
        double g1 = g(z1);
        if (g0 == 0.0 || g0 * g1 < 0.0) {
            double za = z0, zb = z1, ga = g0;
            if (g0 == 0.0) {
                za = zb = z0;
            } else {
                while (zb - za > 1e-14 * (hi - lo)) {
                    const double zm = 0.5 * (za + zb);
                    const double gm = g(zm);
                    if (gm == 0.0) {
                        za = zb = zm;
                        break;
                    }
                    if (ga * gm < 0.0)
                        zb = zm;
                    else {
                        za = zm;
                        ga = gm;
                    }
                }
            }
            double z = 0.5 * (za + zb);
            const double dz = drho_dz(theta, z);
            if (dz != 0.0) z = std::clamp(z - g(z) / dz, lo, hi);
            if (std::abs(g(z)) > 1e-12 * r)
                throw ToleranceError("fiber_solve residual exceeds 1e-12*r");
            out.push_back(make_branch(theta, z));
        }
        z0 = z1;
        g0 = g1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ellipse (random rotation), degenerate circle included.

namespace {

class EllipseShape final : public StarShape {
public:
    EllipseShape(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0 && b > 0.0) || a < b) throw ParameterError("ellipse_shape requires a >= b > 0");
    }

    double rho(double theta, double alpha) const override {
        const double t = theta - alpha;
        const double c = std::cos(t), s = std::sin(t);
        return a_ * b_ / std::sqrt(b_ * b_ * c * c + a_ * a_ * s * s);
    }
    double drho_dtheta(double theta, double alpha) const override {
        const double t = theta - alpha;
        const double c = std::cos(t), s = std::sin(t);
        const double d2 = b_ * b_ * c * c + a_ * a_ * s * s;
        return -a_ * b_ * (a_ * a_ - b_ * b_) * s * c / (d2 * std::sqrt(d2));
    }
    double drho_dz(double theta, double alpha) const override { return -drho_dtheta(theta, alpha); }

    double r_min() const override { return b_; }
    double r_max() const override { return a_; }
    double z_lo() const override { return 0.0; }
    double z_hi() const override { return 2.0 * kPi; }
    bool z_periodic() const override { return true; }
    double density(double) const override { return 1.0 / (2.0 * kPi); }

    std::vector<FiberBranch> fiber_solve(double theta, double r) const override {
        std::vector<FiberBranch> out;
        if (!(r > b_ && r < a_)) return out;
        const double c = std::clamp(
            (a_ / r) * std::sqrt((r * r - b_ * b_) / (a_ * a_ - b_ * b_)), 0.0, 1.0);
        const double t_r = std::acos(c);
        for (double t : {t_r, -t_r, kPi - t_r, t_r - kPi}) {
            const double alpha = wrap_angle(theta - t, 0.0, 2.0 * kPi);
            if (std::abs(rho(theta, alpha) - r) > 1e-12 * r)
                throw ToleranceError("ellipse fiber residual exceeds 1e-12*r");
            out.push_back(make_branch(theta, alpha));
        }
        return out;
    }

    std::string id() const override {
        return (a_ == b_ ? "circle(a=" : "ellipse(a=") + std::to_string(a_) + ",b=" + std::to_string(b_) + ")";
    }

private:
    double a_, b_;
};

}  // namespace

ShapePtr ellipse_shape(double a, double b) { return std::make_shared<EllipseShape>(a, b); }

// ---------------------------------------------------------------------------
// Star-shaped polygon with fixed vertex angles.

namespace {

class PolygonShape : public StarShape {
public:
    PolygonShape(VertexRadii radii, std::vector<double> angles, double zlo, double zhi,
                 double rmin, double rmax, std::string id)
        : radii_(std::move(radii)), angles_(std::move(angles)), zlo_(zlo), zhi_(zhi),
          rmin_(rmin), rmax_(rmax), id_(std::move(id)) {
        const int Q = static_cast<int>(angles_.size());
        if (Q < 3) throw ParameterError("polygon_shape requires at least 3 vertices");
        for (int q = 0; q < Q; ++q) {
            if (q > 0 && !(angles_[q] > angles_[q - 1]))
                throw ParameterError("polygon vertex angles must be strictly increasing");
            if (!(angles_[q] > 0.0 && angles_[q] <= 2.0 * kPi + 1e-12))
                throw ParameterError("polygon vertex angles must lie in (0, 2*pi]");
            for (double z : {zlo_, 0.5 * (zlo_ + zhi_), zhi_})
                if (!(radii_.value(q, z) > 0.0))
                    throw ParameterError("polygon vertex radii must be positive");
        }
    }

    // Segment index q in 1..Q covering theta; vertex 0 is vertex Q shifted by -2*pi.
    int segment_of(double theta) const {
        const int Q = static_cast<int>(angles_.size());
        const double t = wrap_angle(theta, angles_[Q - 1] - 2.0 * kPi, 2.0 * kPi);
        const auto it = std::lower_bound(angles_.begin(), angles_.end(), t);
        return static_cast<int>(it - angles_.begin()) + 1 > Q
                   ? Q
                   : static_cast<int>(it - angles_.begin()) + 1;
    }

    struct Segment {
        double th_prev, th_q;    // bracketing vertex angles (th_prev < theta <= th_q)
        double r_prev, r_q;      // vertex radii at z
        double dr_prev, dr_q;    // their z-derivatives
        double theta;            // wrapped into the segment
    };

    Segment segment_data(double theta, double z) const {
        const int Q = static_cast<int>(angles_.size());
        const double t = wrap_angle(theta, angles_[Q - 1] - 2.0 * kPi, 2.0 * kPi);
        const int q = segment_of(theta);
        Segment s;
        s.theta = t;
        s.th_q = angles_[q - 1];
        s.th_prev = (q == 1) ? angles_[Q - 1] - 2.0 * kPi : angles_[q - 2];
        s.r_q = radii_.value(q - 1, z);
        s.r_prev = radii_.value((q == 1 ? Q : q - 1) - 1, z);
        s.dr_q = radii_.dz(q - 1, z);
        s.dr_prev = radii_.dz((q == 1 ? Q : q - 1) - 1, z);
        return s;
    }

    double rho(double theta, double z) const override {
        const Segment s = segment_data(theta, z);
        const double num = s.r_q * s.r_prev * std::sin(s.th_q - s.th_prev);
        const double den = s.r_q * std::sin(s.th_q - s.theta) + s.r_prev * std::sin(s.theta - s.th_prev);
        return num / den;
    }
    double drho_dtheta(double theta, double z) const override {
        const Segment s = segment_data(theta, z);
        const double den = s.r_q * std::sin(s.th_q - s.theta) + s.r_prev * std::sin(s.theta - s.th_prev);
        const double dden = -s.r_q * std::cos(s.th_q - s.theta) + s.r_prev * std::cos(s.theta - s.th_prev);
        return -rho(theta, z) * dden / den;
    }
    double drho_dz(double theta, double z) const override {
        const Segment s = segment_data(theta, z);
        const double num = s.r_q * s.r_prev * std::sin(s.th_q - s.th_prev);
        const double dnum = (s.dr_q * s.r_prev + s.r_q * s.dr_prev) * std::sin(s.th_q - s.th_prev);
        const double den = s.r_q * std::sin(s.th_q - s.theta) + s.r_prev * std::sin(s.theta - s.th_prev);
        const double dden = s.dr_q * std::sin(s.th_q - s.theta) + s.dr_prev * std::sin(s.theta - s.th_prev);
        return (dnum * den - num * dden) / (den * den);
    }

    double r_min() const override { return rmin_; }
    double r_max() const override { return rmax_; }
    double z_lo() const override { return zlo_; }
    double z_hi() const override { return zhi_; }
    bool z_periodic() const override { return false; }
    double density(double) const override { return 1.0 / (zhi_ - zlo_); }

    std::vector<double> angular_breakpoints(double) const override { return angles_; }

    std::string id() const override { return id_; }

protected:
    VertexRadii radii_;
    std::vector<double> angles_;
    double zlo_, zhi_, rmin_, rmax_;
    std::string id_;
};

class OctagonShape final : public PolygonShape {
public:
    OctagonShape(double a, double b, VertexRadii radii, std::vector<double> angles)
        : PolygonShape(std::move(radii), std::move(angles), -1.0, 1.0, a - b, a + b,
                       "octagon(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")"),
          a_(a), b_(b) {}

    std::vector<FiberBranch> fiber_solve(double theta, double r) const override {
        std::vector<FiberBranch> out;
        if (!(r > r_min() && r < r_max())) return out;
        const Segment s = segment_data(theta, 0.0);
        const int q = segment_of(theta);
        const double sin_d = std::sin(s.th_q - s.th_prev);
        const double s_q = std::sin(s.th_q - s.theta);
        const double s_p = std::sin(s.theta - s.th_prev);
        // One vertex of the segment is fixed at radius a; solve for the moving one.
        double v;
        if (q % 2 == 1)  // vertex q moves, vertex q-1 fixed
            v = r * a_ * s_p / (a_ * sin_d - r * s_q);
        else             // vertex q-1 moves, vertex q fixed
            v = r * a_ * s_q / (a_ * sin_d - r * s_p);
        const double z = (v - a_) / b_;
        if (!(z > z_lo() && z < z_hi())) return out;
        if (std::abs(rho(theta, z) - r) > 1e-12 * r)
            throw ToleranceError("octagon fiber residual exceeds 1e-12*r");
        out.push_back(make_branch(theta, z));
        return out;
    }

private:
    double a_, b_;
};

}  // namespace

ShapePtr polygon_shape(VertexRadii radii, std::vector<double> vertex_angles,
                       double z_lo, double z_hi, double r_min, double r_max,
                       std::string id) {
    return std::make_shared<PolygonShape>(std::move(radii), std::move(vertex_angles),
                                          z_lo, z_hi, r_min, r_max, std::move(id));
}

ShapePtr random_octagon(double a, double b) {
    if (!(a > b && b > 0.0)) throw ParameterError("random_octagon requires a > b > 0");
    VertexRadii radii;
    radii.value = [a, b](int q, double z) {
        return ((q + 1) % 2 == 1) ? a + b * z : a;  // q is 0-based; vertex q+1
    };
    radii.dz = [b](int q, double) { return ((q + 1) % 2 == 1) ? b : 0.0; };
    std::vector<double> angles;
    for (int q = 1; q <= 8; ++q) angles.push_back(q * kPi / 4.0);
    return std::make_shared<OctagonShape>(a, b, std::move(radii), std::move(angles));
}

SurfaceSample surface_sample(const StarShape& shape, double theta, double z) {
    const double r = shape.rho(theta, z);
    const double rt = shape.drho_dtheta(theta, z);
    const double c = std::cos(theta), s = std::sin(theta);
    SurfaceSample out;
    out.position = {r * c, r * s};
    Vec2 n{rt * s + r * c, -rt * c + r * s};
    const double nn = norm(n);
    out.unit_outward_normal = {n.x / nn, n.y / nn};
    out.metric_s = std::sqrt(1.0 + (rt / r) * (rt / r));
    out.line_element = std::sqrt(r * r + rt * rt);
    return out;
}

double dt_r_dr(double a, double b, double r) {
    if (!(a > b && b > 0.0)) throw ParameterError("dt_r_dr requires a > b > 0");
    if (r == a || r == b) throw SingularityError("dt_r_dr singular at r = a or r = b");
    if (!(r > b && r < a)) throw ParameterError("dt_r_dr requires b < r < a");
    return -a * b / (r * std::sqrt((r * r - b * b) * (a * a - r * r)));
}

}  // namespace starscat

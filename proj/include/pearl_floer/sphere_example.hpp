/**
 * The immersed Lagrangian sphere in C^n swept out by the vanishing cycles
 * of W(z) = z_1^2 + ... + z_n^2 + 1 over the unit circle.
 *
 * Over w = exp(2 pi i t) the vanishing cycle is {c x : x in S^{n-1}} with
 * c^2 = w - 1.  Along t in (0, 1) the continuous branch is
 *
 *   c(t) = sqrt(2 sin pi t) exp(i (pi t / 2 + pi / 4)),
 *
 * and both ends t = 0, 1 collapse to the origin, the only double point.
 */
#ifndef PEARL_FLOER_SPHERE_EXAMPLE_HPP
#define PEARL_FLOER_SPHERE_EXAMPLE_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "floer_complex.hpp"
#include "geom_kernel.hpp"
#include "immersion.hpp"

namespace pearl {

struct SphereModel
{
    int n = 2;

    static Complex c(double t)
    {
        const double pi = std::numbers::pi;
        return std::sqrt(2.0 * std::sin(pi * t)) * std::polar(1.0, pi * t / 2.0 + pi / 4.0);
    }

    static double h(double t) { return 0.5 * (1.0 - std::cos(std::numbers::pi * t)); }

    double theta(double t) const
    {
        const double pi = std::numbers::pi;
        return ((n - 1) * (pi * t / 2.0 + pi / 4.0) + pi / 4.0 + 3.0 * pi * t / 2.0) / pi;
    }

    // theta(1^-) - theta(0^+)
    double theta_jump() const { return (n + 2) / 2.0; }

    static Complex W(const CVector& z) { return (z.array() * z.array()).sum() + 1.0; }

    CVector iota(double t, const RVector& x) const { return c(t) * x.cast<Complex>(); }
};

namespace detail {

// Meridian parameter t as a function of the suspension height s; flat at
// both ends so that t is smooth in the ball coordinates around each pole.
inline double sphere_t_of_s(double s)
{
    const double v = std::sin(std::numbers::pi * s / 2.0);
    return v * v;
}

/**
 * In a pole patch with coordinate y (|y| = r) the immersion is G(r) y with
 * G(r) = a(r) exp(i phi(r)), a(r) = sqrt(2 sin pi u) / r, u = sin^2(pi r / 2)
 * and phi = pi/4 + pi u / 2 (south) or 3 pi / 4 - pi u / 2 (north).  Its
 * differential is G (I + kappa yhat yhat^T).
 */
struct SpherePatchProfile
{
    Complex g;
    Complex kappa;
};

inline SpherePatchProfile sphere_patch_profile(double r, int patch)
{
    const double pi = std::numbers::pi;
    const double sign = patch == kSouth ? 1.0 : -1.0;
    const double phi0 = patch == kSouth ? pi / 4.0 : 3.0 * pi / 4.0;
    if (r == 0.0)
        return {std::pow(pi, 1.5) / std::sqrt(2.0) * std::polar(1.0, phi0), Complex(0.0, 0.0)};
    const double sr = std::sin(pi * r / 2.0);
    const double u = sr * sr;
    const double du = 0.5 * pi * std::sin(pi * r);
    const double spu = std::sin(pi * u);
    const double a = std::sqrt(2.0 * spu) / r;
    const double phase = phi0 + sign * pi * u / 2.0;
    const double real = 0.5 * pi * r * std::cos(pi * u) * du / spu - 1.0;
    const double imag = r * sign * pi * du / 2.0;
    return {a * std::polar(1.0, phase), Complex(real, imag)};
}

} // namespace detail

/**
 * Suspension chart (s, x) with t = sin^2(pi s / 2).  With analytic = false
 * the differential is left to finite differences.
 */
inline ImmersionSpec sphere_immersion(int n, bool analytic = true, int resolution = kDefaultResolution)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "sphere dimension must be >= 1");
    ImmersionSpec spec;
    spec.ambient = AmbientSpace(n);
    spec.charts.push_back({"sphere", SuspensionChart{}});
    spec.resolution = resolution;
    spec.position = [](const ChartPoint& p) -> CVector {
        const auto prof = detail::sphere_patch_profile(p.coords.norm(), p.patch);
        return prof.g * p.coords.cast<Complex>();
    };
    if (analytic) {
        spec.differential = [n](const ChartPoint& p) -> CMatrix {
            const double r = p.coords.norm();
            const auto prof = detail::sphere_patch_profile(r, p.patch);
            CMatrix d = CMatrix::Identity(n, n);
            if (r > 0.0) {
                const RVector yhat = p.coords / r;
                d += prof.kappa * (yhat * yhat.transpose()).cast<Complex>();
            }
            return prof.g * d;
        };
    }
    return spec;
}

// Sample of the suspension chart at height s in direction x.
inline ChartPoint sphere_point(double s, const RVector& x)
{
    return s <= 0.5 ? ChartPoint{0, kSouth, s * x} : ChartPoint{0, kNorth, (1.0 - s) * x};
}

// Tangent frames of the t -> 0+ and t -> 1- branches at the origin.
inline std::pair<LagrangianFrame, LagrangianFrame> sphere_branch_frames(int n)
{
    const double pi = std::numbers::pi;
    return {phase_frame(n, pi / 4.0), phase_frame(n, 3.0 * pi / 4.0)};
}

/**
 * Holomorphic discs u(z) = x sqrt(phi(z) - 1) with phi a disc automorphism
 * sending z0 to 1.  The branch i sqrt(1 - phi) is used; 1 - phi has
 * non-negative real part on the closed disc, so it is continuous there.
 */
class DiscFamily
{
public:
    DiscFamily(int n, RVector x, Complex a, double z0_angle)
        : n_(n), x_(std::move(x)), a_(a), z0_(std::polar(1.0, z0_angle)), s0_(z0_angle)
    {
        if (x_.size() != n_ || std::abs(x_.norm() - 1.0) > 1e-12)
            throw Error(ErrorKind::InvalidArgument, "disc direction must be a unit vector in R^n");
        if (!(std::abs(a_) < 1.0))
            throw Error(ErrorKind::InvalidArgument, "automorphism centre must lie in the open disc");
        rotation_ = std::polar(1.0, -std::arg(moebius(z0_)));
    }

    int dim() const noexcept { return n_; }
    Complex jump_point() const noexcept { return z0_; }

    Complex phi(Complex z) const { return rotation_ * moebius(z); }
    Complex dphi(Complex z) const
    {
        const Complex den = 1.0 - std::conj(a_) * z;
        return rotation_ * (1.0 - std::norm(a_)) / (den * den);
    }

    Complex g(Complex z) const { return Complex(0.0, 1.0) * std::sqrt(1.0 - phi(z)); }

    CVector u(Complex z) const { return g(z) * x_.cast<Complex>(); }

    CVector boundary_point(double s) const { return u(std::polar(1.0, s)); }

    // |W(u) - phi| on the boundary circle at angle s.
    double membership_residual(double s) const
    {
        const Complex z = std::polar(1.0, s);
        return std::abs(SphereModel::W(u(z)) - phi(z));
    }

    /**
     * Symplectic area as the boundary integral of u^* sigma, by the
     * trapezoid rule on nodes starting at the jump point.  There the
     * integrand extends continuously by 0.
     */
    double area(int nodes = 1 << 15) const
    {
        double sum = 0.0;
        const double step = 2.0 * std::numbers::pi / nodes;
        for (int j = 1; j < nodes; ++j) {
            const double s = s0_ + j * step;
            const Complex z = std::polar(1.0, s);
            const Complex w = 1.0 - phi(z);
            const Complex gz = Complex(0.0, 1.0) * std::sqrt(w);
            // d/ds g(e^{is}) = g'(z) i z with g' = -i phi' / (2 sqrt(w)).
            const Complex dg = Complex(0.0, -1.0) * dphi(z) / (2.0 * std::sqrt(w)) * Complex(0.0, 1.0) * z;
            sum += 0.5 * (std::conj(gz) * dg).imag();
        }
        return sum * step;
    }

private:
    Complex moebius(Complex z) const { return (z - a_) / (1.0 - std::conj(a_) * z); }

    int n_;
    RVector x_;
    Complex a_;
    Complex z0_;
    double s0_;
    Complex rotation_{1.0, 0.0};
};

inline DiscFamily disc_family(int n, const RVector& x, Complex centre, double jump_angle)
{
    return DiscFamily(n, x, centre, jump_angle);
}

struct SphereDatum
{
    FloerDatum datum;
    std::vector<std::string> notes;
};

// Height function on S^n: minimum y, maximum y', no cancelling trajectories.
inline MorseData sphere_morse_preset(int n)
{
    return MorseData{{{"y", 0}, {"y'", n}}, {}};
}

/**
 * Generators y (0), y' (n), gamma (n + 1, action +1), gamma' (-1, action -1)
 * with d(gamma') = y and d(y') = gamma: each of the two unique pearly
 * trajectories counted once, in the direction that raises the degree.
 */
inline SphereDatum sphere_datum(int n)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "sphere dimension must be >= 1");
    SphereDatum out;
    auto& d = out.datum;
    d.ambient_dim = n;
    d.generators = {
        {"y", GeneratorKind::Crit, 0, std::nullopt, std::nullopt},
        {"y'", GeneratorKind::Crit, n, std::nullopt, std::nullopt},
        {"gamma", GeneratorKind::Pair, n + 1, 1.0, "gamma'"},
        {"gamma'", GeneratorKind::Pair, -1, -1.0, "gamma"},
    };
    d.differential = {{"gamma'", "y"}, {"y'", "gamma"}};
    out.notes.push_back("NOTE: the trajectory counts are entered as gamma' -> y and y' -> gamma, the only "
                        "pairing compatible with degrees -1, 0, n, n+1; reading them as d(gamma) = y and "
                        "d(y') = gamma' would lower the degree by n+1 instead of raising it by 1");
    if (n < 2)
        out.notes.push_back("WARNING: strong positivity fails for n = 1; the datum is outside the regime in "
                            "which the pearly differential is known to square to zero");
    return out;
}

} // namespace pearl

#endif

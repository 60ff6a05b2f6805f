// Built-in immersions for the command line and the test suite.
#ifndef PEARL_FLOER_MODELS_HPP
#define PEARL_FLOER_MODELS_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "immersion.hpp"
#include "sphere_example.hpp"

namespace pearl {

struct ModelInstance
{
    std::string name;
    ImmersionSpec spec;
    MorseData morse;
};

// t -> (1/2) sin 4 pi t + i sin 2 pi t on R / Z; one double point at 0.
inline ImmersionSpec figure_eight_immersion(int resolution = kDefaultResolution)
{
    ImmersionSpec spec;
    spec.ambient = AmbientSpace(1);
    spec.charts.push_back({"figure-eight", BoxChart{{0.0}, {1.0}, {true}}});
    spec.resolution = resolution;
    const double pi = std::numbers::pi;
    spec.position = [pi](const ChartPoint& p) {
        const double t = p.coords(0);
        CVector z(1);
        z(0) = Complex(0.5 * std::sin(4 * pi * t), std::sin(2 * pi * t));
        return z;
    };
    spec.differential = [pi](const ChartPoint& p) {
        const double t = p.coords(0);
        CMatrix d(1, 1);
        d(0, 0) = Complex(2 * pi * std::cos(4 * pi * t), 2 * pi * std::cos(2 * pi * t));
        return d;
    };
    return spec;
}

// The unit circle in C: embedded, but neither exact nor graded.
inline ImmersionSpec circle_immersion(int resolution = kDefaultResolution)
{
    ImmersionSpec spec;
    spec.ambient = AmbientSpace(1);
    spec.charts.push_back({"circle", BoxChart{{0.0}, {1.0}, {true}}});
    spec.resolution = resolution;
    const double tau = 2.0 * std::numbers::pi;
    spec.position = [tau](const ChartPoint& p) {
        CVector z(1);
        z(0) = std::polar(1.0, tau * p.coords(0));
        return z;
    };
    spec.differential = [tau](const ChartPoint& p) {
        CMatrix d(1, 1);
        d(0, 0) = Complex(0.0, tau) * std::polar(1.0, tau * p.coords(0));
        return d;
    };
    return spec;
}

// S^1 x [-1, 1] -> C^2, (phi, u) -> (exp(2 pi i phi), u).
inline ImmersionSpec annulus_immersion(int resolution = kDefaultResolution)
{
    ImmersionSpec spec;
    spec.ambient = AmbientSpace(2);
    spec.charts.push_back({"annulus", BoxChart{{0.0, -1.0}, {1.0, 1.0}, {true, false}}});
    spec.resolution = resolution;
    const double tau = 2.0 * std::numbers::pi;
    spec.position = [tau](const ChartPoint& p) {
        CVector z(2);
        z(0) = std::polar(1.0, tau * p.coords(0));
        z(1) = Complex(p.coords(1), 0.0);
        return z;
    };
    spec.differential = [tau](const ChartPoint& p) {
        CMatrix d = CMatrix::Zero(2, 2);
        d(0, 0) = Complex(0.0, tau) * std::polar(1.0, tau * p.coords(0));
        d(1, 1) = 1.0;
        return d;
    };
    return spec;
}

// The unit cube in R^n, embedded.
inline ImmersionSpec flat_immersion(int n, int resolution = kDefaultResolution)
{
    ImmersionSpec spec;
    spec.ambient = AmbientSpace(n);
    spec.charts.push_back({"flat", BoxChart{std::vector<double>(static_cast<std::size_t>(n), -1.0),
                                            std::vector<double>(static_cast<std::size_t>(n), 1.0),
                                            std::vector<bool>(static_cast<std::size_t>(n), false)}});
    spec.resolution = resolution;
    spec.position = [](const ChartPoint& p) -> CVector { return p.coords.cast<Complex>(); };
    spec.differential = [n](const ChartPoint&) -> CMatrix { return CMatrix::Identity(n, n); };
    return spec;
}

inline std::vector<std::string> model_names() { return {"sphere", "figure-eight", "circle", "annulus", "flat"}; }

inline ModelInstance make_model(const std::string& name, int dim, int resolution)
{
    if (name == "sphere")
        return {name, sphere_immersion(dim, true, resolution), sphere_morse_preset(dim)};
    if (name == "figure-eight")
        return {name, figure_eight_immersion(resolution), MorseData{{{"min", 0}, {"max", 1}}, {}}};
    if (name == "circle")
        return {name, circle_immersion(resolution), MorseData{{{"min", 0}, {"max", 1}}, {}}};
    if (name == "annulus")
        return {name, annulus_immersion(resolution), MorseData{{{"min", 0}, {"saddle", 1}}, {}}};
    if (name == "flat")
        return {name, flat_immersion(dim, resolution), MorseData{{{"min", 0}}, {}}};
    throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "'");
}

} // namespace pearl

#endif

#include <cmath>
#include <numbers>
#include <random>

#include <catch_amalgamated.hpp>

#include <pearl_floer/sphere_example.hpp>

#include "oracles.hpp"

using namespace pearl;
using Catch::Matchers::WithinAbs;

namespace {

RVector random_unit(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    RVector x(n);
    for (int k = 0; k < n; ++k)
        x(k) = g(rng);
    return x / x.norm();
}

// Real span of two frames agrees when F^H G is real.
double plane_defect(const LagrangianFrame& f, const LagrangianFrame& g)
{
    return (f.matrix().adjoint() * g.matrix()).imag().cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("closed-form sphere data", "[sphere]")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ut(1e-6, 1.0 - 1e-6);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 6;
        const double t = ut(rng);
        const RVector x = random_unit(rng, n);
        const SphereModel m{n};
        const CVector z = m.iota(t, x);
        CHECK(std::abs(SphereModel::W(z) - std::polar(1.0, 2.0 * std::numbers::pi * t)) < 1e-12);
        CHECK_THAT(std::norm(SphereModel::c(t)), WithinAbs(2.0 * std::sin(std::numbers::pi * t), 1e-13));
        const Complex c = SphereModel::c(t);
        CHECK(std::abs(c * c - (std::polar(1.0, 2.0 * std::numbers::pi * t) - 1.0)) < 1e-13);
    }
    CHECK(std::abs(SphereModel::c(1e-12)) < 1e-5);
    CHECK(std::abs(SphereModel::c(1.0 - 1e-12)) < 1e-5);
    CHECK(SphereModel::h(0.0) == 0.0);
    CHECK_THAT(SphereModel::h(1.0), WithinAbs(1.0, 1e-15));
    const SphereModel m{4};
    CHECK_THAT(m.theta(1.0) - m.theta(0.0), WithinAbs(m.theta_jump(), 1e-14));
}

TEST_CASE("sphere charts reproduce the closed form", "[sphere]")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> us(0.0, 1.0);
    for (int n = 1; n <= 6; ++n) {
        const auto spec = sphere_immersion(n);
        const ImmersionEvaluator eval(spec);
        auto fd_spec = sphere_immersion(n, false);
        const ImmersionEvaluator fd(fd_spec);
        const SphereModel model{n};
        for (int trial = 0; trial < 30; ++trial) {
            const double s = us(rng);
            const RVector x = random_unit(rng, n);
            const auto p = sphere_point(s, x);
            const double t = detail::sphere_t_of_s(s);
            CHECK((eval.position(p) - model.iota(t, x)).norm() < 1e-12);
            CHECK(std::abs(SphereModel::W(eval.position(p)) - std::polar(1.0, 2.0 * std::numbers::pi * t)) < 1e-12);

            const CMatrix a = eval.differential(p);
            const CMatrix b = fd.differential(p);
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-7 * a.cwiseAbs().maxCoeff());
            const auto f = make_unitary_frame(a, 1e-10);
            (void)f;
            // The same point seen from the other patch.
            if (s > 0.05 && s < 0.95) {
                const auto other = detail::to_patch(spec.charts[0], p, p.patch == kSouth ? kNorth : kSouth);
                CHECK((eval.position(other) - eval.position(p)).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("branch frames at the double point", "[sphere]")
{
    for (int n = 1; n <= 6; ++n) {
        const auto [south, north] = sphere_branch_frames(n);
        const auto ang = kahler_angles(south, north);
        for (double a : ang.alphas)
            CHECK_THAT(a, WithinAbs(0.25, 1e-14));
        CHECK_THAT(ang.total, WithinAbs(n / 4.0, 1e-13));
        const SphereModel m{n};
        // From the t -> 0 branch to the t -> 1 branch and back.
        const auto fwd = index_of_pair(m.theta(0.0), m.theta(1.0), ang, n);
        const auto bwd = index_of_pair(m.theta(1.0), m.theta(0.0), kahler_angles(north, south), n);
        CHECK(fwd.rounded == n + 1);
        CHECK(bwd.rounded == -1);
        CHECK(fwd.residual < 1e-12);

        // The chart frames at the poles span the same planes.
        const auto spec = sphere_immersion(n);
        const ImmersionEvaluator eval(spec);
        const RVector zero = RVector::Zero(n);
        CHECK(eval.position({0, kSouth, zero}).norm() == 0.0);
        CHECK(eval.position({0, kNorth, zero}).norm() == 0.0);
        CHECK(plane_defect(eval.frame({0, kSouth, zero}), south) < 1e-14);
        CHECK(plane_defect(eval.frame({0, kNorth, zero}), north) < 1e-14);
    }
}

TEST_CASE("sphere pipeline end to end", "[sphere][pipeline]")
{
    for (int n : {2, 3}) {
        auto mesh = sample_immersion(sphere_immersion(n, true, 128));
        mesh = compute_grading(compute_primitive(std::move(mesh), 0), 0);
        const auto recs = find_double_points(mesh);
        REQUIRE(geometric_count(recs) == 1);
        std::vector<int> indices;
        for (const auto& r : recs) {
            CHECK(r.point.norm() < 1e-8);
            CHECK_THAT(std::abs(r.action), WithinAbs(1.0, 1e-6));
            CHECK(r.residual < 1e-4);
            CHECK(std::abs(r.index_raw - r.index) < 1e-4);
            CHECK((r.action > 0) == (r.index == n + 1));
            indices.push_back(r.index);
        }
        std::sort(indices.begin(), indices.end());
        CHECK(indices == std::vector<int>{-1, n + 1});
    }
}

TEST_CASE("disc family", "[sphere][disc]")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> rad(0.0, 0.6);
    for (int n : {2, 3, 4})
        for (int trial = 0; trial < 10; ++trial) {
            const RVector x = random_unit(rng, n);
            const Complex centre = std::polar(rad(rng), ang(rng));
            const DiscFamily disc = disc_family(n, x, centre, ang(rng));
            CHECK(disc.u(disc.jump_point()).norm() < 1e-7);
            CHECK(std::abs(disc.phi(disc.jump_point()) - 1.0) < 1e-12);
            for (int k = 0; k < 16; ++k) {
                const double s = ang(rng);
                CHECK(disc.membership_residual(s) < 1e-9);
                // On the vanishing cycle over phi: u = c x with |c|^2 = |phi - 1|.
                const Complex z = std::polar(1.0, s);
                CHECK_THAT(disc.u(z).squaredNorm(), WithinAbs(std::abs(disc.phi(z) - 1.0), 1e-9));
            }
            CHECK_THAT(disc.area(), WithinAbs(1.0, 1e-6));
        }
    CHECK_THROWS_AS(DiscFamily(2, RVector::Ones(2), 0.0, 0.0), Error);
    CHECK_THROWS_AS(DiscFamily(2, RVector::Unit(2, 0), 1.5, 0.0), Error);
}

TEST_CASE("sphere datum", "[sphere][datum]")
{
    for (int n = 1; n <= 6; ++n) {
        const auto s = sphere_datum(n);
        CHECK(validate_datum(s.datum).ok());
        CHECK(total_rank(floer_cohomology(s.datum)) == 0);
        CHECK(check_positivity(s.datum, PositivityMode::Strong).pass == (n >= 2));
        const auto r = rank_inequality_report(s.datum);
        CHECK(r.tight);
        CHECK(s.notes.front().rfind("NOTE", 0) == 0);
        CHECK(s.notes.size() == (n >= 2 ? 1u : 2u));
        // The disc through the positive pair has area equal to its action.
        const auto g = s.datum.find("gamma");
        REQUIRE(g);
        CHECK(*s.datum.generators[*g].action == 1.0);
        CHECK(degeneration_budget({{Strip{1, 0}}}, n) == 1);
        CHECK(strip_energy(*s.datum.generators[*g].action, 0.0, {}) == 1.0);
    }
}

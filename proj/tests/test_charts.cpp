#include "doctest.h"
#include "slgeo/charts.hpp"
#include "slgeo/integrator.hpp"
#include "slgeo/sampling.hpp"

#include <cmath>

using namespace slgeo;
using V = Vec3<double>;
using P2 = Vec2<double>;

namespace {

const std::array<ChartId, 4> charts{ChartId::X, ChartId::Y, ChartId::U, ChartId::W};

V random_point(Rng& rng) { return V(rng.signed_mag(0.2, 2), rng.signed_mag(0.2, 2), rng.signed_mag(0.2, 2)); }

// central-difference Jacobian of the transition from the affine chart
Mat3<double> chart_jacobian(const V& z, ChartId c)
{
    Mat3<double> J;
    for (int j = 0; j < 3; ++j) {
        const V e = 1e-6 * V::Unit(j);
        J.col(j) = (to_chart<double>(z + e, ChartId::Affine, c) - to_chart<double>(z - e, ChartId::Affine, c)) / 2e-6;
    }
    return J;
}

} // namespace

TEST_SUITE("charts")
{
    TEST_CASE("transition examples")
    {
        CHECK((to_chart<double>(V(1, 1, 1), ChartId::Affine, ChartId::X) - V(1, 1, 1)).norm() == 0);
        CHECK((to_chart<double>(V(2, 4, 2), ChartId::Affine, ChartId::X) - V(1, 2, 0.5)).norm() == 0);
        CHECK((to_chart<double>(V(2, 4, 8), ChartId::Affine, ChartId::W) - V(0.5, 2, 4)).norm() == 0);
        CHECK((to_chart<double>(V(2, 4, 8), ChartId::Affine, ChartId::Y) - V(0.5, 2, 0.25)).norm() == 0);
        CHECK((to_chart<double>(V(2, 4, 8), ChartId::Affine, ChartId::U) - V(4, 2, 0.5)).norm() == 0);
        CHECK_THROWS_AS(to_chart<double>(V(1, 1, 0), ChartId::Affine, ChartId::X), Error);
        CHECK_THROWS_AS(to_chart<double>(V(0, 1, 1), ChartId::Affine, ChartId::W), Error);
        CHECK_THROWS_AS(to_chart<double>(V(1, 1, 0), ChartId::X, ChartId::Affine), Error);
    }

    TEST_CASE("transitions compose to the identity")
    {
        Rng rng(51);
        double worst = 0;
        for (int n = 0; n < 200; ++n) {
            const V z = random_point(rng);
            for (ChartId a : charts) {
                const V p = to_chart<double>(z, ChartId::Affine, a);
                worst = std::max(worst, (to_chart<double>(p, a, ChartId::Affine) - z).norm() / z.norm());
                for (ChartId b : charts) {
                    const V q = to_chart<double>(p, a, b);
                    worst = std::max(worst, (to_chart<double>(q, b, a) - p).norm() / std::max(1.0, p.norm()));
                }
            }
        }
        CHECK(worst <= 1e-12);
    }

    TEST_CASE("case 1 chart fields")
    {
        auto f = case1_field<double>(0.4, 2.1, 1.3);
        const double a = f.a, b = f.b, c = f.c;
        auto X = field_in_chart(f, ChartId::X);
        Rng rng(52);
        for (int n = 0; n < 20; ++n) {
            const V x = random_point(rng);
            const V oracle(x(1) * (a - c * x(0) * x(0)), x(0) * (b - c * x(1) * x(1)), -c * x(0) * x(1) * x(2));
            CHECK((X.bracket(x) - oracle).norm() <= 1e-13 * std::max(1.0, oracle.norm()));
            const P2 y(x(0), x(1));
            const P2 yo(y(1) * (a - b * y(0) * y(0)), y(0) * (c - b * y(1) * y(1)));
            CHECK((field_in_chart(f, ChartId::Y).at_infinity(y) - yo).norm() <= 1e-13 * std::max(1.0, yo.norm()));
            const P2 uo(y(1) * (c - a * y(0) * y(0)), y(0) * (b - a * y(1) * y(1)));
            CHECK((field_in_chart(f, ChartId::U).at_infinity(y) - uo).norm() <= 1e-13 * std::max(1.0, uo.norm()));
        }
    }

    TEST_CASE("case 2, 3 and 4 chart fields")
    {
        Rng rng(53);
        auto f2 = case2_field<double>(0.7, 1.2, 0.4);
        auto f3 = case3_field<double>(1.5, -0.6, 0.8);
        auto f4 = case4_field<double>(1.3, 0.9);
        for (int n = 0; n < 20; ++n) {
            const V x = random_point(rng);
            {
                const double a = f2.a, b = f2.b;
                const V o(b * (x(1) * x(1) - x(0) * x(0) + 1) - a * x(0) * x(0) * x(1),
                          x(0) * (a * (1 - x(1) * x(1)) - 2 * b * x(1)), -x(0) * x(2) * (a * x(1) + b));
                CHECK((field_in_chart(f2, ChartId::X).bracket(x) - o).norm() <= 1e-13 * std::max(1.0, o.norm()));
            }
            {
                const double a = f3.a, b = f3.b;
                const V o(b - a * x(0) * x(0), -x(0) * (b + 2 * a * x(1)), -a * x(0) * x(2));
                CHECK((field_in_chart(f3, ChartId::X).bracket(x) - o).norm() <= 1e-13 * std::max(1.0, o.norm()));
                const V w = x;
                const V ow(-b * w(0) * w(2) * w(2), -(a * w(1) + b * w(2) + b * w(1) * w(2) * w(2)),
                           w(2) * (a - b * w(2) * w(2)));
                CHECK((field_in_chart(f3, ChartId::W).bracket(w) - ow).norm() <= 1e-13 * std::max(1.0, ow.norm()));
            }
            {
                const double k = f4.zeta * f4.nu * f4.nu, zn = f4.zeta * f4.nu;
                const V o(k * (2 * x(0) - zn), k * (zn * x(0) - x(0) * x(0) + 2 * x(1)), k * x(2));
                CHECK((field_in_chart(f4, ChartId::X).bracket(x) - o).norm() <= 1e-13 * std::max(1.0, o.norm()));
            }
        }
        CHECK_THROWS_AS(field_in_chart(f2, ChartId::W), Error);
        CHECK_THROWS_AS(field_in_chart(f4, ChartId::Y), Error);
        CHECK_THROWS_AS(field_in_chart(f3, ChartId::U), Error);
    }

    TEST_CASE("pushforward matches the Jacobian of the transition")
    {
        Rng rng(54);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            const auto f = build_field(reduce<double>(random_phi(k, rng).phi));
            for (ChartId c : charts) {
                if (!chart_supported(k, c))
                    continue;
                const auto g = field_in_chart(f, c);
                double worst = 0;
                for (int n = 0; n < 100; ++n) {
                    const V z = random_point(rng);
                    const V lhs = chart_jacobian(z, c) * f(z);
                    const V rhs = g(to_chart<double>(z, ChartId::Affine, c));
                    worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
                }
                CHECK_MESSAGE(worst <= 1e-6, "case ", int(k), " chart ", to_string(c));
            }
        }
    }

    TEST_CASE("pushing through W then to X equals the direct pushforward")
    {
        auto f = case3_field<double>(2.0, 1.0, 1.0);
        auto W = field_in_chart(f, ChartId::W);
        auto X = field_in_chart(f, ChartId::X);
        Rng rng(55);
        for (int n = 0; n < 50; ++n) {
            const V w = random_point(rng);
            // chain rule through the W -> X transition
            Mat3<double> J;
            for (int j = 0; j < 3; ++j) {
                const V e = 1e-6 * V::Unit(j);
                J.col(j) = (to_chart<double>(w + e, ChartId::W, ChartId::X) - to_chart<double>(w - e, ChartId::W, ChartId::X)) / 2e-6;
            }
            const V x = to_chart<double>(w, ChartId::W, ChartId::X);
            CHECK((J * W(w) - X(x)).norm() <= 1e-6 * std::max(1.0, X(x).norm()));
        }
    }

    TEST_CASE("singular points at infinity")
    {
        auto f = case1_from_ab<double>(1, 1);
        const auto s = infinity_singularities(f);
        const double r = 1 / std::sqrt(2.0);
        int idem = 0, origin = 0, y = 0, u = 0;
        for (const auto& p : s) {
            if (p.chart == ChartId::X && p.kind == SingularityKind::IdempotentType) {
                CHECK(std::abs(std::abs(p.coords(0)) - r) < 1e-15);
                CHECK(std::abs(std::abs(p.coords(1)) - r) < 1e-15);
                ++idem;
            }
            if (p.chart == ChartId::X && p.coords.norm() == 0) {
                CHECK(p.kind == SingularityKind::Saddle);
                ++origin;
            }
            y += p.chart == ChartId::Y;
            u += p.chart == ChartId::U;
        }
        CHECK(idem == 4);
        CHECK(origin == 1);
        CHECK(y == 1);
        CHECK(u == 1);
        CHECK(s.size() == 7);

        // ab < 0: center at the origin of the X chart
        auto g = case1_field<double>(1, 2, 3);
        for (const auto& p : infinity_singularities(g))
            if (p.chart == ChartId::X)
                CHECK(p.kind == SingularityKind::Center);

        auto f3 = case3_field<double>(2, 1, 1); // (a, b) = (1, 1)
        std::vector<P2> pts;
        for (const auto& p : infinity_singularities(f3))
            if (p.chart == ChartId::X)
                pts.push_back(p.coords);
        REQUIRE(pts.size() == 2);
        CHECK((pts[0] - P2(1, -0.5)).norm() < 1e-15);
        CHECK((pts[1] - P2(-1, -0.5)).norm() < 1e-15);

        auto f4 = case4_field<double>(1, 1);
        const auto s4 = infinity_singularities(f4);
        REQUIRE(s4.size() == 2);
        CHECK((s4[0].coords - P2(0.5, -0.125)).norm() < 1e-15);
        CHECK(s4[1].chart == ChartId::Y);
    }

    TEST_CASE("listed singular points zero the field at infinity")
    {
        Rng rng(56);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            for (int n = 0; n < 50; ++n) {
                const auto f = build_field(reduce<double>(random_phi(k, rng).phi));
                for (const auto& p : infinity_singularities(f)) {
                    const ChartField<double> g{p.chart, f};
                    CHECK(g.at_infinity(p.coords).norm() <= 1e-10 * std::max(1.0, p.coords.squaredNorm() * 10));
                }
            }
        }
    }

    TEST_CASE("leaf at infinity")
    {
        auto f = case1_field<double>(1, 2, 3);
        CHECK(leaf_at_infinity(f, V(0, 0, 1)).K == doctest::Approx(1.0 / 3));

        auto g = case1_from_ab<double>(1, 1); // nu = (0, 2, 1)
        const auto idem = leaf_at_infinity(g, V(1, 1, std::sqrt(2.0)));
        CHECK(idem.conic == Conic::Degenerate);
        CHECK(std::isnan(idem.K));

        // K = -6.5: all (1 - K nu_i) > 0
        const auto e = leaf_at_infinity(g, V(2, 0.5, 1));
        CHECK(e.K == doctest::Approx(-6.5));
        CHECK(e.conic == Conic::Ellipse);
        CHECK(e.r1 == doctest::Approx(std::sqrt(7.5)));
        CHECK(e.r2 == doctest::Approx(std::sqrt(7.5 / 14)));
        // the leaf runs between two of the four null points
        CHECK(e.ends[0] == EndKind::NullPoint);
        CHECK(e.ends[1] == EndKind::NullPoint);

        const auto h = leaf_at_infinity(g, V(0.2, 0.3, 1));
        CHECK(h.conic == Conic::Hyperbola);

        const auto l = leaf_at_infinity(g, V(2, 1 / std::sqrt(2.0), 1));
        CHECK(l.conic == Conic::Line);
        CHECK(l.ends[0] == EndKind::NullPoint);
        CHECK(l.ends[1] == EndKind::ChartBoundary);

        auto f3 = case3_field<double>(2, 1, 1);
        CHECK(leaf_at_infinity(f3, V(0.3, 0.2, 1)).conic == Conic::Parabola);
        CHECK(leaf_at_infinity(f3, V(1, 0.2, 1)).conic == Conic::Line);
    }

    TEST_CASE("leaf level is constant along trajectories")
    {
        auto f = case1_from_ab<double>(1, 1);
        const V z0(0.3, -0.5, 0.8);
        const double K0 = leaf_at_infinity(f, z0).K;
        auto tr = integrate(f, z0, {0, 0.5});
        double worst = 0;
        for (const auto& s : tr.samples)
            worst = std::max(worst, std::abs(leaf_at_infinity(f, s.z).K - K0));
        CHECK(worst <= 1e-6);
    }

    TEST_CASE("escape quadrature on the plane x2 = sqrt(b/c)")
    {
        auto f = case1_from_ab<double>(1, 1);
        const double r = 1 / std::sqrt(2.0);
        // beyond p1: finite toward x1 = sqrt(a/c), infinite toward x1 = +inf
        const V z0(2, r, 1);
        const auto leaf = leaf_at_infinity(f, z0);
        REQUIRE(leaf.conic == Conic::Line);
        const auto toward_p = escape_quadrature(f, leaf, z0, LeafEnd::Lower);
        const auto toward_inf = escape_quadrature(f, leaf, z0, LeafEnd::Upper);
        CHECK(toward_p.finite);
        CHECK_FALSE(toward_inf.finite);
        CHECK(std::isinf(toward_inf.value));
        // oracle: direct integration toward the blow-up
        IntegratorOptions o;
        o.keep_samples = false;
        auto tr = integrate(f, z0, {0, 20 * toward_p.value}, o);
        REQUIRE(tr.termination == Termination::BlowUp);
        CHECK(std::abs(tr.t_est - toward_p.value) <= 1e-6 * std::abs(toward_p.value));
    }

    TEST_CASE("escape quadrature on ellipse and parabola leaves")
    {
        IntegratorOptions o;
        o.keep_samples = false;
        auto check = [&](const EAField<double>& f, const V& z0) {
            const auto leaf = leaf_at_infinity(f, z0);
            for (LeafEnd end : {LeafEnd::Lower, LeafEnd::Upper}) {
                const auto e = escape_quadrature(f, leaf, z0, end);
                if (!e.finite || e.kind != EndKind::NullPoint)
                    continue;
                auto tr = integrate(f, z0, {0, 3 * e.value}, o);
                REQUIRE(tr.termination == Termination::BlowUp);
                CHECK(std::abs(tr.t_est - e.value) <= 1e-6 * std::abs(e.value));
            }
        };
        check(case1_from_ab<double>(1, 1), V(2, 0.5, 1));
        check(case3_field<double>(2, 1, 1), V(0.3, 0.2, 1));
        check(case3_field<double>(2, 1, 1), V(1.7, 0.2, -1));
        check(case4_field<double>(1.3, 0.9), V(0.4, -0.3, 0.7));
    }

    TEST_CASE("escape quadrature input errors")
    {
        auto f = case1_from_ab<double>(1, 1);
        const auto leaf = leaf_at_infinity(f, V(1, 0.5, 0));
        CHECK_FALSE(leaf.in_chart);
        CHECK_THROWS_AS(escape_quadrature(f, leaf, V(1, 0.5, 0), LeafEnd::Upper), Error);
    }
}

#include "doctest.h"
#include "slgeo/integrator.hpp"
#include "slgeo/sampling.hpp"

using namespace slgeo;
using V = Vec3<double>;
using CV = Vec3<cplx>;

TEST_SUITE("integrator")
{
    TEST_CASE("zero field gives a constant trajectory")
    {
        auto f = build_field<double>(reduce<double>(Mat3<double>::Identity()));
        const V z0(0.3, -0.2, 0.9);
        auto tr = integrate(f, z0, {0, 10});
        CHECK(tr.termination == Termination::SpanCompleted);
        for (const auto& s : tr.samples)
            CHECK((s.z - z0).norm() == 0);
    }

    TEST_CASE("blow-up on an idempotent ray matches the pole of s' = kappa s^2")
    {
        auto f = case1_field<double>(1, 3, 2); // (a,b,c) = (1,1,2)
        const V w(std::sqrt(0.5), std::sqrt(0.5), 1.0);
        CHECK((f(w) - w).norm() < 1e-15); // kappa = 1
        for (double s0 : {0.5, 1.0, 2.0, 4.0}) {
            auto tr = integrate(f, V(s0 * w), {0, 3 / s0});
            REQUIRE(tr.termination == Termination::BlowUp);
            CHECK(std::abs(tr.t_est - 1 / s0) * s0 <= 1e-6);
        }
        // negative s0: the pole is in the past
        auto fw = integrate(f, V(-w), {0, 5});
        CHECK(fw.termination == Termination::SpanCompleted);
        auto bw = integrate(f, V(-w), {0, -5});
        CHECK(bw.termination == Termination::BlowUp);
        CHECK(bw.t_est == doctest::Approx(-1).epsilon(1e-6));
    }

    TEST_CASE("complete metric stays inside its level-set bound")
    {
        // nu = (1,2,3): J = 2.5 I1 - I2 = 1.5 z1^2 + 0.5 z2^2 + 0.5 z3^2 is conserved and positive definite
        auto f = case1_field<double>(1, 2, 3);
        auto J = [](const V& z) { return 1.5 * z(0) * z(0) + 0.5 * z(1) * z(1) + 0.5 * z(2) * z(2); };
        Rng rng(41);
        for (int i = 0; i < 10; ++i) {
            const V z0 = rng.unit3();
            auto tr = integrate(f, z0, {0, 100});
            CHECK(tr.termination == Termination::SpanCompleted);
            const double bound = std::sqrt(J(z0) / 0.5);
            CHECK(tr.max_norm <= bound * (1 + 1e-9));
            CHECK(tr.integral_drift <= 1e-8);
        }
    }

    TEST_CASE("invalid input")
    {
        auto f = case1_field<double>(1, 3, 2);
        CHECK_THROWS_AS(integrate(f, V(1, 0, 0), {0, std::nan("")}), Error);
        IntegratorOptions o;
        o.rel_tol = -1;
        CHECK_THROWS_AS(integrate(f, V(1, 0, 0), {0, 1}, o), Error);
    }

    TEST_CASE("homogeneity time scaling")
    {
        Rng rng(42);
        auto f = case3_field<double>(1.5, -0.6, 0.8);
        const V z0 = rng.unit3();
        const double sigma = 2.5;
        auto a = integrate(f, z0, {0, 2.0});
        auto b = integrate(f, V(sigma * z0), {0, 2.0 / sigma});
        REQUIRE(a.termination == Termination::SpanCompleted);
        REQUIRE(b.termination == Termination::SpanCompleted);
        for (double t : {0.1, 0.37, 0.5, 0.8}) {
            const V za = a.dense(sigma * t), zb = b.dense(t);
            CHECK((zb - sigma * za).norm() <= 1e-8 * std::max(1.0, zb.norm()));
        }
    }

    TEST_CASE("complex time with theta = 0 reproduces real integration exactly")
    {
        auto fr = case1_field<double>(0.7, 2.1, 1.3);
        auto fc = case1_field<cplx>(0.7, 2.1, 1.3);
        const V z0(0.4, -0.9, 0.5);
        auto r = integrate(fr, z0, {0, 5});
        auto c = integrate_complex_ray(fc, z0.cast<cplx>(), {0.0, 5.0});
        REQUIRE(r.samples.size() == c.samples.size());
        bool same = true;
        for (size_t i = 0; i < r.samples.size(); ++i)
            for (int k = 0; k < 3; ++k)
                same &= r.samples[i].z(k) == c.samples[i].z(k).real() && c.samples[i].z(k).imag() == 0;
        CHECK(same);
    }

    TEST_CASE("complex blow-up along the ray through the pole")
    {
        auto f = case1_field<cplx>(1, 3, 2);
        const CV w(std::sqrt(0.5), std::sqrt(0.5), 1.0);
        const cplx s0 = std::polar(1.0, M_PI / 4);
        const cplx tstar = 1.0 / s0;
        auto tr = integrate_complex_ray(f, CV(s0 * w), {std::arg(tstar), 2.0});
        REQUIRE(tr.termination == Termination::BlowUp);
        CHECK(std::abs(tr.t_est - tstar) <= 1e-5);
    }

    TEST_CASE("complex diag(1,1,2) is complete along rays")
    {
        auto nf = reduce<cplx>(Vec3<cplx>(1, 1, 2).asDiagonal());
        auto f = build_field(nf);
        Rng rng(43);
        const CV z0(cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.5, -0.1));
        IntegratorOptions o;
        o.keep_samples = false;
        for (int k = 0; k < 16; ++k) {
            auto tr = integrate_complex_ray(f, z0, {k * M_PI / 8, 50.0}, o);
            CHECK(tr.termination == Termination::SpanCompleted);
        }
    }

    TEST_CASE("monodromy")
    {
        auto f = case1_field<cplx>(1, 3, 2);
        const CV w(std::sqrt(0.5), std::sqrt(0.5), 1.0);
        LoopPath point{{cplx(0.3, 0.2), cplx(0.3, 0.2)}};
        CHECK(monodromy_loop(f, w, point) == 0);
        // s(t) = 1/(1-t) around its pole
        CHECK(monodromy_loop(f, w, circle_loop(0.0, 1.0, 0.5, 64)) <= 1e-8);
        auto g = case1_field<cplx>(cplx(0.6, 0.1), cplx(1.9, -0.3), cplx(1.2, 0.2));
        const CV z0(cplx(0.2, 0.1), cplx(-0.3, 0.05), cplx(0.25, -0.2));
        CHECK(monodromy_loop(g, z0, square_loop(0.0, cplx(2, 2), 1.0)) <= 1e-8);
        LoopPath open{{0.0, 1.0}};
        CHECK_THROWS_AS(monodromy_loop(g, z0, open), Error);
        // a loop through the pole reports the offending segment
        LoopPath hit{{0.0, 2.0, cplx(2, 1), 0.0}};
        CHECK_THROWS_WITH_AS(monodromy_loop(f, w, hit), doctest::Contains("segment 0"), Error);
    }

    TEST_CASE("first-integral drift at default tolerances")
    {
        Rng rng(44);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            auto f = build_field(reduce<double>(random_phi(k, rng).phi));
            for (int i = 0; i < 5; ++i) {
                auto tr = integrate(f, V(0.3 * rng.unit3()), {0, 1});
                if (tr.termination == Termination::SpanCompleted)
                    CHECK(tr.integral_drift <= 1e-8);
            }
        }
    }
}

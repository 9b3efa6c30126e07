#include "doctest.h"
#include "slgeo/euler_arnold.hpp"
#include "slgeo/sampling.hpp"

using namespace slgeo;
using V = Vec3<double>;

namespace {

Mat2<double> mat(const V& z)
{
    Mat2<double> m;
    m << z(0) / 2, (z(1) + z(2)) / 2, (z(1) - z(2)) / 2, -z(0) / 2;
    return m;
}

// fixed-step RK4 on the Lax equation in standard coordinates
std::vector<V> lax_samples(const Mat3<double>& phi, V z, double h, int n)
{
    const Mat3<double> inv = phi.inverse();
    auto f = [&](const V& y) { return bracket<double>(y, V(inv * y)); };
    std::vector<V> out{z};
    for (int i = 0; i < n; ++i) {
        const V k1 = f(z), k2 = f(z + h / 2 * k1), k3 = f(z + h / 2 * k2), k4 = f(z + h * k3);
        z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        out.push_back(z);
    }
    return out;
}

} // namespace

TEST_SUITE("euler_arnold")
{
    TEST_CASE("field coefficients")
    {
        auto f = case1_field<double>(1, 3, 2);
        CHECK(f.a == 1);
        CHECK(f.b == 1);
        CHECK(f.c == 2);
        auto id = build_field<double>(reduce<double>(Mat3<double>::Identity()));
        CHECK(id.kind == Case::One);
        CHECK(id.is_zero());
        auto g = case3_field<double>(2, 1, 1);
        CHECK(g.a == 1);
        CHECK(g.b == 1);
    }

    TEST_CASE("evaluation")
    {
        auto f = case1_field<double>(1, 3, 2);
        CHECK((f(V(1, 1, 1)) - V(1, 1, 2)).norm() == 0);
        Rng rng(31);
        const std::array<EAField<double>, 4> fields{case1_field<double>(0.3, 1.7, -2.0), case2_field<double>(0.7, 1.2, -0.4),
                                                    case3_field<double>(1.5, -0.6, 0.8), case4_field<double>(1.3, 0.9)};
        for (const auto& g : fields) {
            CHECK(g(V::Zero()).norm() == 0);
            for (int i = 0; i < 20; ++i) {
                const V z = rng.unit3();
                CHECK((g(2 * z) - 4 * g(z)).norm() < 1e-13);
            }
        }
    }

    TEST_CASE("Lax form of the identity vanishes")
    {
        Rng rng(32);
        for (int i = 0; i < 10; ++i)
            CHECK(lax_rhs<double>(Mat3<double>::Identity(), rng.unit3()).norm() < 1e-15);
        Mat3<double> sing = Mat3<double>::Zero();
        CHECK_THROWS_AS(lax_rhs<double>(sing, V(1, 0, 0)), Error);
    }

    TEST_CASE("Lax form against the matrix commutator")
    {
        Mat3<double> phi = V(1, 0.5, 1.0 / 3).asDiagonal();
        const V z(0, 1, 1);
        const V w = phi.inverse() * z;
        const Mat2<double> C = mat(z) * mat(w) - mat(w) * mat(z);
        const V oracle(C(0, 0) - C(1, 1), C(0, 1) + C(1, 0), C(0, 1) - C(1, 0));
        CHECK((lax_rhs<double>(phi, z) - oracle).norm() < 1e-14);
    }

    TEST_CASE("conjugation identity between the Lax form and the case fields")
    {
        Rng rng(33);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            double worst = 0;
            for (int i = 0; i < 200; ++i) {
                const auto s = random_phi(k, rng);
                const auto nf = reduce<double>(s.phi);
                const auto f = build_field(nf);
                const V z = rng.unit3();
                const V lhs = nf.P.inverse() * lax_rhs<double>(s.phi, nf.P * z);
                worst = std::max(worst, (lhs - f(z)).norm() / std::max(1.0, f(z).norm()));
            }
            CHECK_MESSAGE(worst < 1e-8, "case ", int(k), " residual ", worst);
        }
    }

    TEST_CASE("first integrals")
    {
        auto f = case1_field<double>(0.4, 2.0, 3.0);
        auto I = first_integrals(f, V(1, 0, 0));
        CHECK(I.I1 == 1);
        CHECK(I.I2 == doctest::Approx(0.4));
        auto z0 = first_integrals(f, V(V::Zero()));
        CHECK(z0.I1 == 0);
        CHECK(z0.I2 == 0);

        auto g = case3_field<double>(2, 1, 1);
        const V z(1, 1, 1);
        auto J = first_integrals(g, z);
        // oracle: pseudo-orthonormal Gram and the inverse template
        Mat3<double> G;
        G << 1, 0, 0, 0, 0, 1, 0, 1, 0;
        Mat3<double> Q;
        Q << 2, 0, 0, 0, 1, -1, 0, 0, 1;
        CHECK(J.I1 == doctest::Approx(z.dot(G * z)));
        CHECK(J.I1 == doctest::Approx(3));
        CHECK(J.I2 == doctest::Approx(z.dot(G * Q * z)));
        CHECK(J.I2 == doctest::Approx(3));
    }

    TEST_CASE("first integrals are annihilated by the fields")
    {
        Rng rng(34);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            for (int n = 0; n < 5; ++n) {
                const auto f = build_field(reduce<double>(random_phi(k, rng).phi));
                for (int i = 0; i < 200; ++i) {
                    const V z = rng.unit3() * rng.uniform(0.1, 3.0);
                    const auto g = integral_gradients(f, z);
                    const double scale = std::max(1.0, f(z).norm() * g.norm());
                    CHECK(std::abs(g.row(0).dot(f(z))) <= 1e-12 * scale);
                    CHECK(std::abs(g.row(1).dot(f(z))) <= 1e-12 * scale);
                }
            }
        }
    }

    TEST_CASE("delta reverses the field")
    {
        for (auto f : {case1_field<double>(0.3, 1.7, -2.0), case3_field<double>(1.5, -0.6, 0.8),
                       case4_field<double>(1.3, 0.9), case2_field<double>(1, 0.2, 0.5)}) {
            auto g = f;
            g.delta = -1;
            const V z(0.3, -0.8, 1.1);
            CHECK((f(z) + g(z)).norm() == 0);
            CHECK((f.jacobian(z) + g.jacobian(z)).norm() == 0);
        }
    }

    TEST_CASE("jacobian matches finite differences")
    {
        for (auto f : {case1_field<double>(0.3, 1.7, -2.0), case3_field<double>(1.5, -0.6, 0.8),
                       case4_field<double>(1.3, 0.9), case2_field<double>(1, 0.2, 0.5)}) {
            const V z(0.3, -0.8, 1.1);
            Mat3<double> fd;
            for (int j = 0; j < 3; ++j) {
                const V e = 1e-6 * V::Unit(j);
                fd.col(j) = (f(z + e) - f(z - e)) / 2e-6;
            }
            CHECK((fd - f.jacobian(z)).norm() < 1e-8);
        }
    }

    TEST_CASE("group reconstruction")
    {
        std::vector<V> zero(101, V::Zero());
        auto g0 = group_reconstruct<double>(zero, 0.01);
        CHECK((g0.gamma.back() - Mat2<double>::Identity()).norm() == 0);

        std::vector<V> e1(201, V::Unit(0));
        auto g1 = group_reconstruct<double>(e1, 0.01);
        const double t = 2.0;
        CHECK(g1.gamma.back()(0, 0) == doctest::Approx(std::exp(t / 2)).epsilon(1e-9));
        CHECK(g1.gamma.back()(1, 1) == doctest::Approx(std::exp(-t / 2)).epsilon(1e-9));

        std::vector<V> bad(10, V::Unit(0));
        bad[5](1) = std::numeric_limits<double>::infinity();
        auto gb = group_reconstruct<double>(bad, 0.1);
        CHECK(gb.truncated);
        CHECK(gb.gamma.size() == 5);
    }

    TEST_CASE("Killing pairing with a right-invariant field is constant along geodesics")
    {
        Rng rng(35);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            const auto s = random_phi(k, rng);
            const double h = 1e-3;
            const auto z = lax_samples(s.phi, 0.5 * rng.unit3(), h, 2000);
            std::vector<V> x;
            for (const auto& zi : z)
                x.push_back(s.phi.inverse() * zi);
            const auto g = group_reconstruct<double>(x, h);
            REQUIRE(!g.truncated);
            const V w = rng.unit3();
            double first = 0, worst = 0, det = 0;
            for (size_t i = 0; i < g.gamma.size(); ++i) {
                const Mat2<double>& gi = g.gamma[i];
                const V ad = from_matrix<double>(gi.inverse() * mat(w) * gi);
                const double v = killing<double>(ad, z[i]);
                if (i == 0)
                    first = v;
                worst = std::max(worst, std::abs(v - first));
                det = std::max(det, std::abs(gi.determinant() - 1));
            }
            CHECK_MESSAGE(worst < 1e-8, "case ", int(k));
            CHECK(det < 1e-9);
        }
    }
}

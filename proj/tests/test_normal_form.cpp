#include "doctest.h"
#include "slgeo/normal_form.hpp"
#include "slgeo/sampling.hpp"

#include <algorithm>

using namespace slgeo;

namespace {

std::vector<cplx> oracle_eigenvalues(const Mat3<double>& m)
{
    Eigen::EigenSolver<Mat3<double>> es(m);
    std::vector<cplx> v(es.eigenvalues().data(), es.eigenvalues().data() + 3);
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return v;
}

int oracle_rank(const Mat3<double>& m)
{
    Eigen::FullPivLU<Mat3<double>> lu(m);
    lu.setThreshold(1e-9);
    return int(lu.rank());
}

const EigenEntry* find(const Spectrum& s, cplx v)
{
    for (const auto& e : s.eigenvalues)
        if (std::abs(e.value - v) < 1e-9)
            return &e;
    return nullptr;
}

double recon_residual(const NormalForm<double>& nf, const Mat3<double>& phi)
{
    return (nf.P * template_matrix(nf) * nf.P.inverse() - phi).cwiseAbs().maxCoeff();
}

double gram_residual(const NormalForm<double>& nf)
{
    return (gram<double>(nf.P) - adapted_gram(nf.kind)).cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("normal_form")
{
    TEST_CASE("spectrum of a diagonal map")
    {
        Mat3<double> d = Vec3<double>(1, 2, 3).asDiagonal();
        auto s = spectrum3<double>(d);
        REQUIRE(s.eigenvalues.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(s.eigenvalues[i].value.real() == doctest::Approx(i + 1).epsilon(1e-14));
            CHECK(s.eigenvalues[i].alg_mult == 1);
            CHECK(s.eigenvalues[i].geo_mult == 1);
        }
    }

    TEST_CASE("spectrum of a Jordan block against characteristic polynomial and rank oracles")
    {
        Mat3<double> m;
        m << 2, 1, 0, 0, 2, 0, 0, 0, 5;
        auto ev = oracle_eigenvalues(m);
        auto s = spectrum3<double>(m);
        REQUIRE(s.eigenvalues.size() == 2);
        const EigenEntry* two = find(s, 2.0);
        const EigenEntry* five = find(s, 5.0);
        REQUIRE(two);
        REQUIRE(five);
        CHECK(std::abs(ev[0] - 2.0) < 1e-6);
        CHECK(two->alg_mult == 2);
        CHECK(two->geo_mult == 3 - oracle_rank(m - 2 * Mat3<double>::Identity()));
        CHECK(two->geo_mult == 1);
        CHECK(five->alg_mult == 1);
    }

    TEST_CASE("spectrum of a rotation block")
    {
        Mat3<double> m;
        m << 3, 0, 0, 0, 1, 2, 0, -2, 1;
        auto s = spectrum3<double>(m);
        REQUIRE(s.eigenvalues.size() == 3);
        CHECK(find(s, cplx(1, 2)));
        CHECK(find(s, cplx(1, -2)));
        CHECK(find(s, cplx(3, 0)));
    }

    TEST_CASE("triple eigenvalues")
    {
        auto s = spectrum3<double>(2.5 * Mat3<double>::Identity());
        REQUIRE(s.eigenvalues.size() == 1);
        CHECK(s.eigenvalues[0].alg_mult == 3);
        CHECK(s.eigenvalues[0].geo_mult == 3);
        Mat3<double> j;
        j << 1, 1, 0, 0, 1, 1, 0, 0, 1;
        auto t = spectrum3<double>(j);
        REQUIRE(t.eigenvalues.size() == 1);
        CHECK(t.eigenvalues[0].geo_mult == 1);
    }

    TEST_CASE("reduce a diagonal map in the standard basis")
    {
        Mat3<double> d = Vec3<double>(2, 3, 5).asDiagonal();
        auto nf = reduce<double>(d);
        CHECK(nf.kind == Case::One);
        CHECK((nf.P - Mat3<double>::Identity()).norm() < 1e-14);
        CHECK(nf.params.lambda[0] == doctest::Approx(2));
        CHECK(nf.params.lambda[1] == doctest::Approx(3));
        CHECK(nf.params.lambda[2] == doctest::Approx(5));
        CHECK(nf.basis.kind == BasisType::Orthonormal);
        CHECK(nf.basis.delta == 1);
    }

    TEST_CASE("reduce a case-3 template in a random pseudo-orthonormal basis")
    {
        Rng rng(21);
        CaseParams<double> p;
        p.mu = 1;
        p.lam = 2;
        p.zeta = 1;
        for (int i = 0; i < 20; ++i) {
            auto s = phi_from_template(Case::Three, p, random_isometry(rng) * pseudo_frame());
            auto nf = reduce<double>(s.phi);
            CHECK(nf.kind == Case::Three);
            CHECK(nf.params.mu == doctest::Approx(1).epsilon(1e-10));
            CHECK(nf.params.lam == doctest::Approx(2).epsilon(1e-10));
            CHECK(std::abs(nf.params.zeta) > 1e-6);
            CHECK(recon_residual(nf, s.phi) < 1e-9);
            CHECK(gram_residual(nf) < 1e-9);
            CHECK(nf.basis.kind == BasisType::PseudoOrthonormal);
        }
    }

    TEST_CASE("reduce a case-2 template reproduces its spectrum")
    {
        CaseParams<double> p;
        p.mu = 1;
        p.alpha = 2;
        p.beta = 1;
        const Mat3<double> phi = template_matrix<double>(Case::Two, p);
        auto nf = reduce<double>(phi);
        CHECK(nf.kind == Case::Two);
        auto ev = oracle_eigenvalues(phi);
        CHECK(std::abs(ev[0] - 1.0) < 1e-12);
        CHECK(nf.params.mu == doctest::Approx(1));
        CHECK(nf.params.alpha == doctest::Approx(2));
        CHECK(std::abs(nf.params.beta) == doctest::Approx(1));
        CHECK(recon_residual(nf, phi) < 1e-12);
        CHECK(nf.basis.kind == BasisType::Orthonormal);
    }

    TEST_CASE("reduce rejects non-self-adjoint input")
    {
        Mat3<double> m = Mat3<double>::Identity();
        m(0, 1) = 1;
        CHECK_THROWS_AS(reduce<double>(m), Error);
    }

    TEST_CASE("inverse parameters")
    {
        CaseParams<double> p1;
        p1.lambda = {1, 0.5, 1.0 / 3};
        auto q1 = invert_params<double>(Case::One, p1);
        CHECK(q1.nu3[0] == doctest::Approx(1));
        CHECK(q1.nu3[1] == doctest::Approx(2));
        CHECK(q1.nu3[2] == doctest::Approx(3));

        CaseParams<double> p3;
        p3.mu = 0.5;
        p3.lam = 1;
        p3.zeta = 1;
        auto q3 = invert_params<double>(Case::Three, p3);
        CHECK(q3.eta == doctest::Approx(2));
        CHECK(q3.nu == doctest::Approx(1));
        CHECK(q3.zeta == doctest::Approx(1));

        CaseParams<double> p2;
        p2.mu = 1;
        p2.alpha = 0;
        p2.beta = 1;
        auto q2 = invert_params<double>(Case::Two, p2);
        // numeric inverse of the rotation block [[0,1],[-1,0]] is [[0,-1],[1,0]]
        Eigen::Matrix2d blk;
        blk << 0, 1, -1, 0;
        const Eigen::Matrix2d inv = blk.inverse();
        CHECK(q2.eta == doctest::Approx(1));
        CHECK(q2.gamma == doctest::Approx(inv(0, 0)));
        CHECK(q2.zeta == doctest::Approx(inv(0, 1)));

        CaseParams<double> z;
        z.lambda = {1, 0, 2};
        CHECK_THROWS_AS(invert_params<double>(Case::One, z), Error);
    }

    TEST_CASE("random maps: reconstruction, Gram certification, inverse templates")
    {
        Rng rng(22);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            int fails = 0;
            for (int i = 0; i < 1000; ++i) {
                auto s = random_phi(k, rng);
                NormalForm<double> nf;
                try {
                    nf = reduce<double>(s.phi);
                } catch (const Error& e) {
                    ++fails;
                    MESSAGE(e.what());
                    continue;
                }
                if (nf.kind != k || recon_residual(nf, s.phi) > 1e-8 || gram_residual(nf) > 1e-8)
                    ++fails;
                const Mat3<double> num = template_matrix(nf).inverse();
                const Mat3<double> ana = inverse_template<double>(nf.kind, invert_params(nf));
                if ((num - ana).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, num.cwiseAbs().maxCoeff()))
                    ++fails;
                if (nf.basis.delta != 1)
                    ++fails;
            }
            CHECK_MESSAGE(fails == 0, "case ", int(k));
        }
    }

    TEST_CASE("case tag is invariant under conjugation by automorphisms")
    {
        Rng rng(23);
        for (Case k : {Case::One, Case::Two, Case::Three, Case::Four}) {
            for (int i = 0; i < 50; ++i) {
                auto s = random_phi(k, rng);
                const Mat3<double> A = random_isometry(rng, 0.5);
                Mat3<double> phi2 = A * s.phi * A.inverse();
                phi2 = 0.5 * (phi2 + killing_gram() * phi2.transpose() * killing_gram());
                CHECK(reduce<double>(phi2).kind == reduce<double>(s.phi).kind);
            }
        }
    }

    TEST_CASE("complex maps")
    {
        Mat3<cplx> d = Vec3<cplx>(1, 1, 2).asDiagonal();
        auto nf = reduce<cplx>(d);
        CHECK(nf.kind == Case::One);
        bool has_double = false;
        for (const auto& e : nf.spectrum.eigenvalues)
            has_double |= e.geo_mult >= 2;
        CHECK(has_double);
        Mat3<cplx> d3 = Vec3<cplx>(cplx(1, 1), 2, cplx(3, -0.5)).asDiagonal();
        auto nf3 = reduce<cplx>(d3);
        CHECK(nf3.kind == Case::One);
        CHECK(nf3.spectrum.eigenvalues.size() == 3);
        CHECK((nf3.P * template_matrix(nf3) * nf3.P.inverse() - d3).cwiseAbs().maxCoeff() < 1e-12);
        // complex Jordan case built from a real pseudo-orthonormal frame
        CaseParams<cplx> p;
        p.lam = cplx(1, 1);
        p.zeta = cplx(0.5, 0.2);
        const Mat3<cplx> P0 = pseudo_frame().cast<cplx>();
        const Mat3<cplx> phi = P0 * template_matrix<cplx>(Case::Four, p) * P0.inverse();
        auto nf4 = reduce<cplx>(phi);
        CHECK(nf4.kind == Case::Four);
        CHECK((nf4.P * template_matrix(nf4) * nf4.P.inverse() - phi).cwiseAbs().maxCoeff() < 1e-10);
    }
}

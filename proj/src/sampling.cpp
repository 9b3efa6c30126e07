#include "slgeo/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace slgeo {

Vec3<double> Rng::unit3()
{
    Vec3<double> v(normal(), normal(), normal());
    return v / v.norm();
}

Mat3<double> random_isometry(Rng& rng, double spread)
{
    const Vec3<double> x(rng.uniform(-spread, spread), rng.uniform(-spread, spread), rng.uniform(-spread, spread));
    const Mat2<double> g = to_matrix<double>(x).exp();
    const Mat2<double> gi = g.inverse();
    Mat3<double> ad;
    for (int j = 0; j < 3; ++j)
        ad.col(j) = from_matrix<double>(g * to_matrix<double>(Vec3<double>::Unit(j)) * gi);
    return ad;
}

Mat3<double> pseudo_frame()
{
    const double r = 1.0 / std::sqrt(2.0);
    Mat3<double> s;
    s << 1, 0, 0, 0, r, r, 0, r, -r;
    return s;
}

SampledPhi phi_from_template(Case kind, const CaseParams<double>& p, const Mat3<double>& P0)
{
    SampledPhi s{kind, p, P0, P0 * template_matrix<double>(kind, p) * P0.inverse()};
    // symmetrize against roundoff so the map is self-adjoint to machine precision
    const Mat3<double> G = killing_gram();
    s.phi = 0.5 * (s.phi + G * s.phi.transpose() * G);
    return s;
}

SampledPhi random_phi(Case kind, Rng& rng)
{
    CaseParams<double> p;
    switch (kind) {
    case Case::One:
        for (auto& l : p.lambda)
            l = rng.signed_mag(0.3, 3.0);
        break;
    case Case::Two:
        p.mu = rng.signed_mag(0.3, 3.0);
        p.alpha = rng.uniform(-2.0, 2.0);
        p.beta = rng.signed_mag(0.3, 2.0);
        break;
    case Case::Three:
        p.mu = rng.signed_mag(0.3, 3.0);
        do
            p.lam = rng.signed_mag(0.3, 3.0);
        while (std::abs(p.lam - p.mu) < 0.2);
        p.zeta = rng.signed_mag(0.3, 2.0);
        break;
    case Case::Four:
        p.lam = rng.signed_mag(0.3, 3.0);
        p.zeta = rng.uniform(0.3, 2.0);
        break;
    }
    Mat3<double> P0 = random_isometry(rng);
    if (kind == Case::Three || kind == Case::Four)
        P0 = P0 * pseudo_frame();
    if (rng.sign() < 0)
        P0 = -P0;
    return phi_from_template(kind, p, P0);
}

} // namespace slgeo

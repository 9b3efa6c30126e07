#include "slgeo/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace slgeo {

Mat3<double> killing_gram()
{
    Mat3<double> g = Mat3<double>::Zero();
    g(0, 0) = 1;
    g(1, 1) = 1;
    g(2, 2) = -1;
    return g;
}

Mat3<double> pseudo_gram()
{
    Mat3<double> g = Mat3<double>::Zero();
    g(0, 0) = 1;
    g(1, 2) = 1;
    g(2, 1) = 1;
    return g;
}

template <class T> Mat2<T> to_matrix(const Vec3<T>& z)
{
    Mat2<T> m;
    m(0, 0) = z(0) / 2.0;
    m(1, 1) = -z(0) / 2.0;
    m(0, 1) = (z(1) + z(2)) / 2.0;
    m(1, 0) = (z(1) - z(2)) / 2.0;
    return m;
}

template <class T> Vec3<T> from_matrix(const Mat2<T>& m)
{
    return Vec3<T>(m(0, 0) - m(1, 1), m(0, 1) + m(1, 0), m(0, 1) - m(1, 0));
}

template <class T> Vec3<T> bracket(const Vec3<T>& x, const Vec3<T>& y)
{
    return Vec3<T>(x(2) * y(1) - x(1) * y(2), x(0) * y(2) - x(2) * y(0), x(0) * y(1) - x(1) * y(0));
}

template <class T> AlgebraElement<T> bracket(const AlgebraElement<T>& x, const AlgebraElement<T>& y)
{
    if (x.basis_id != y.basis_id)
        throw Error("bracket: operands refer to different bases");
    if (x.basis_id != 0)
        throw Error("bracket: bracket table only known for the standard basis");
    return {bracket<T>(x.coords, y.coords), 0};
}

template <class T> Mat3<T> ad(const Vec3<T>& x)
{
    Mat3<T> m;
    for (int j = 0; j < 3; ++j)
        m.col(j) = bracket<T>(x, Vec3<T>::Unit(j));
    return m;
}

template <class T> T killing(const Vec3<T>& x, const Vec3<T>& y)
{
    return x(0) * y(0) + x(1) * y(1) - x(2) * y(2);
}

template <class T> T killing(const AlgebraElement<T>& x, const AlgebraElement<T>& y)
{
    if (x.basis_id != y.basis_id || x.basis_id != 0)
        throw Error("killing: operands must both be in the standard basis");
    return killing<T>(x.coords, y.coords);
}

template <class T> T killing_trace(const Vec3<T>& x, const Vec3<T>& y)
{
    return T(2.0) * (to_matrix<T>(x) * to_matrix<T>(y)).trace();
}

template <class T> T killing_ad(const Vec3<T>& x, const Vec3<T>& y)
{
    return (ad<T>(x) * ad<T>(y)).trace() / 2.0;
}

template <class T> bool check_self_adjoint(const Mat3<T>& phi, double tol)
{
    Mat3<T> g = killing_gram().cast<T>();
    Mat3<T> r = phi.transpose() * g - g * phi;
    return r.cwiseAbs().rowwise().sum().maxCoeff() <= tol && std::abs(phi.determinant()) > tol;
}

template <class T> Mat3<T> gram(const Mat3<T>& cols)
{
    return cols.transpose() * killing_gram().cast<T>() * cols;
}

namespace {

template <class T> bool close(const Mat3<T>& a, const Mat3<double>& b, double tol)
{
    return (a - b.cast<T>()).cwiseAbs().maxCoeff() <= tol;
}

// returns +1/-1 if br = ±v within tol, 0 otherwise
template <class T> int sign_match(const Vec3<T>& br, const Vec3<T>& v, double tol)
{
    double s = std::max(1.0, v.cwiseAbs().maxCoeff());
    if ((br - v).cwiseAbs().maxCoeff() <= tol * s)
        return 1;
    if ((br + v).cwiseAbs().maxCoeff() <= tol * s)
        return -1;
    return 0;
}

} // namespace

template <class T> BasisKind classify_basis(const Mat3<T>& cols, double tol)
{
    if (std::abs(cols.determinant()) <= tol)
        throw Error("classify_basis: vectors are linearly dependent");
    std::array<int, 3> p{0, 1, 2};
    const Mat3<double> on = killing_gram(), pon = pseudo_gram();
    do {
        Mat3<T> c;
        for (int k = 0; k < 3; ++k)
            c.col(k) = cols.col(p[k]);
        Mat3<T> g = gram<T>(c);
        if (close<T>(g, on, tol)) {
            int d = sign_match<T>(bracket<T>(c.col(0), c.col(1)), c.col(2), 1e-7);
            if (d != 0)
                return {BasisType::Orthonormal, d, p};
        }
        if (close<T>(g, pon, tol)) {
            int d = sign_match<T>(bracket<T>(c.col(1), c.col(2)), c.col(0), 1e-7);
            if (d != 0)
                return {BasisType::PseudoOrthonormal, d, p};
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return {BasisType::Neither, 1, {0, 1, 2}};
}

template <class T>
BasisKind classify_basis(const Vec3<T>& v1, const Vec3<T>& v2, const Vec3<T>& v3, double tol)
{
    Mat3<T> c;
    c << v1, v2, v3;
    return classify_basis<T>(c, tol);
}

std::string to_string(BasisType k)
{
    switch (k) {
    case BasisType::Orthonormal: return "orthonormal";
    case BasisType::PseudoOrthonormal: return "pseudo-orthonormal";
    default: return "neither";
    }
}

#define SLGEO_INST(T)                                                                              \
    template Mat2<T> to_matrix<T>(const Vec3<T>&);                                                 \
    template Vec3<T> from_matrix<T>(const Mat2<T>&);                                               \
    template Vec3<T> bracket<T>(const Vec3<T>&, const Vec3<T>&);                                   \
    template AlgebraElement<T> bracket<T>(const AlgebraElement<T>&, const AlgebraElement<T>&);     \
    template Mat3<T> ad<T>(const Vec3<T>&);                                                        \
    template T killing<T>(const Vec3<T>&, const Vec3<T>&);                                         \
    template T killing<T>(const AlgebraElement<T>&, const AlgebraElement<T>&);                    \
    template T killing_trace<T>(const Vec3<T>&, const Vec3<T>&);                                   \
    template T killing_ad<T>(const Vec3<T>&, const Vec3<T>&);                                      \
    template bool check_self_adjoint<T>(const Mat3<T>&, double);                                   \
    template Mat3<T> gram<T>(const Mat3<T>&);                                                      \
    template BasisKind classify_basis<T>(const Mat3<T>&, double);                                  \
    template BasisKind classify_basis<T>(const Vec3<T>&, const Vec3<T>&, const Vec3<T>&, double);

SLGEO_INST(double)
SLGEO_INST(cplx)

} // namespace slgeo

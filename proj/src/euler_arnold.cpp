#include "slgeo/euler_arnold.hpp"

#include <cmath>

namespace slgeo {

template <class T> Vec3<T> EAField<T>::operator()(const Vec3<T>& z) const
{
    Vec3<T> r;
    switch (kind) {
    case Case::One:
        r << a * z(1) * z(2), b * z(0) * z(2), c * z(0) * z(1);
        break;
    case Case::Two:
        r << b * (z(1) * z(1) + z(2) * z(2)), z(0) * (a * z(2) - b * z(1)), z(0) * (a * z(1) + b * z(2));
        break;
    case Case::Three:
        r << b * z(2) * z(2), -z(0) * (a * z(1) + b * z(2)), a * z(0) * z(2);
        break;
    case Case::Four: {
        const T k = zeta * nu * nu, zn = zeta * nu;
        r << k * z(2) * (z(0) - zn * z(2)), k * (z(1) * z(2) - z(0) * z(0) + zn * z(0) * z(2)), -k * z(2) * z(2);
        break;
    }
    }
    return delta > 0 ? r : Vec3<T>(-r);
}

template <class T> Mat3<T> EAField<T>::jacobian(const Vec3<T>& z) const
{
    Mat3<T> J;
    switch (kind) {
    case Case::One:
        J << T(0), a * z(2), a * z(1), b * z(2), T(0), b * z(0), c * z(1), c * z(0), T(0);
        break;
    case Case::Two:
        J << T(0), 2.0 * b * z(1), 2.0 * b * z(2), a * z(2) - b * z(1), -b * z(0), a * z(0), a * z(1) + b * z(2),
            a * z(0), b * z(0);
        break;
    case Case::Three:
        J << T(0), T(0), 2.0 * b * z(2), -(a * z(1) + b * z(2)), -a * z(0), -b * z(0), a * z(2), T(0), a * z(0);
        break;
    case Case::Four: {
        const T k = zeta * nu * nu, zn = zeta * nu;
        J << k * z(2), T(0), k * (z(0) - 2.0 * zn * z(2)), k * (-2.0 * z(0) + zn * z(2)), k * z(2),
            k * (z(1) + zn * z(0)), T(0), T(0), -2.0 * k * z(2);
        break;
    }
    }
    return delta > 0 ? J : Mat3<T>(-J);
}

template <class T> bool EAField<T>::is_zero() const
{
    switch (kind) {
    case Case::One: return a == T(0) && b == T(0) && c == T(0);
    case Case::Two:
    case Case::Three: return a == T(0) && b == T(0);
    case Case::Four: return zeta * nu * nu == T(0);
    }
    return false;
}

template <class T> EAField<T> field_from_inverse(Case kind, const InverseParams<T>& q, int delta)
{
    EAField<T> f;
    f.kind = kind;
    f.inv = q;
    f.delta = delta;
    switch (kind) {
    case Case::One:
        f.a = q.nu3[1] - q.nu3[2];
        f.b = q.nu3[2] - q.nu3[0];
        f.c = f.a + f.b;
        break;
    case Case::Two:
        f.a = q.gamma - q.eta;
        f.b = q.zeta;
        break;
    case Case::Three:
        f.a = q.eta - q.nu;
        f.b = q.zeta * q.nu * q.nu;
        break;
    case Case::Four:
        f.zeta = q.zeta;
        f.nu = q.nu;
        break;
    }
    return f;
}

template <class T> EAField<T> build_field(const NormalForm<T>& nf)
{
    return field_from_inverse<T>(nf.kind, invert_params<T>(nf), nf.basis.delta);
}

template <class T> EAField<T> case1_field(T nu1, T nu2, T nu3)
{
    InverseParams<T> q;
    q.nu3 = {nu1, nu2, nu3};
    return field_from_inverse<T>(Case::One, q);
}

template <class T> EAField<T> case1_from_ab(T a, T b) { return case1_field<T>(T(1) - b, T(1) + a, T(1)); }

template <class T> EAField<T> case2_field(T eta, T gamma, T zeta)
{
    InverseParams<T> q;
    q.eta = eta;
    q.gamma = gamma;
    q.zeta = zeta;
    return field_from_inverse<T>(Case::Two, q);
}

template <class T> EAField<T> case3_field(T eta, T nu, T zeta)
{
    InverseParams<T> q;
    q.eta = eta;
    q.nu = nu;
    q.zeta = zeta;
    return field_from_inverse<T>(Case::Three, q);
}

template <class T> EAField<T> case4_field(T nu, T zeta)
{
    InverseParams<T> q;
    q.nu = nu;
    q.zeta = zeta;
    return field_from_inverse<T>(Case::Four, q);
}

template <class T> Vec3<T> lax_rhs(const Mat3<T>& phi, const Vec3<T>& z)
{
    Eigen::FullPivLU<Mat3<T>> lu(phi);
    if (!lu.isInvertible())
        throw Error("lax_rhs: map is singular");
    return bracket<T>(z, lu.solve(z));
}

template <class T> AlgebraElement<T> lax_rhs(const Mat3<T>& phi, const AlgebraElement<T>& z)
{
    if (z.basis_id != 0)
        throw Error("lax_rhs: element must be in the standard basis");
    return {lax_rhs<T>(phi, z.coords), 0};
}

template <class T> FirstIntegrals<T> first_integrals(const EAField<T>& f, const Vec3<T>& z)
{
    const Mat3<T> G = adapted_gram(f.kind).template cast<T>();
    const Mat3<T> Q = inverse_template<T>(f.kind, f.inv);
    return {(z.transpose() * G * z)(0), (z.transpose() * G * Q * z)(0)};
}

template <class T> Eigen::Matrix<T, 2, 3> integral_gradients(const EAField<T>& f, const Vec3<T>& z)
{
    const Mat3<T> G = adapted_gram(f.kind).template cast<T>();
    const Mat3<T> GQ = G * inverse_template<T>(f.kind, f.inv);
    Eigen::Matrix<T, 2, 3> g;
    g.row(0) = (2.0 * (G * z)).transpose();
    g.row(1) = ((GQ + GQ.transpose()) * z).transpose();
    return g;
}

namespace {

template <class T> bool finite(const Vec3<T>& v)
{
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(std::abs(v(i))))
            return false;
    return true;
}

// cubic Lagrange value at the midpoint between samples k and k+1
template <class T> Vec3<T> midpoint(const std::vector<Vec3<T>>& x, size_t k)
{
    const size_t n = x.size();
    if (n < 4)
        return (x[k] + x[k + 1]) / 2.0;
    size_t j = k == 0 ? 0 : k - 1;
    if (j + 3 >= n)
        j = n - 4;
    const double s = double(k - j) + 0.5; // position inside the stencil j..j+3
    Vec3<T> r = Vec3<T>::Zero();
    for (int i = 0; i < 4; ++i) {
        double w = 1;
        for (int m = 0; m < 4; ++m)
            if (m != i)
                w *= (s - m) / double(i - m);
        r += w * x[j + i];
    }
    return r;
}

} // namespace

template <class T> GroupCurve<T> group_reconstruct(const std::vector<Vec3<T>>& x, double h)
{
    GroupCurve<T> out;
    Mat2<T> g = Mat2<T>::Identity();
    if (x.empty())
        return out;
    out.gamma.push_back(g);
    for (size_t k = 0; k + 1 < x.size(); ++k) {
        if (!finite<T>(x[k]) || !finite<T>(x[k + 1])) {
            out.truncated = true;
            break;
        }
        const Mat2<T> x0 = to_matrix<T>(x[k]), xm = to_matrix<T>(midpoint<T>(x, k)), x1 = to_matrix<T>(x[k + 1]);
        const Mat2<T> k1 = g * x0;
        const Mat2<T> k2 = (g + (h / 2) * k1) * xm;
        const Mat2<T> k3 = (g + (h / 2) * k2) * xm;
        const Mat2<T> k4 = (g + h * k3) * x1;
        g += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        g /= std::sqrt(g.determinant());
        out.gamma.push_back(g);
    }
    return out;
}

#define SLGEO_INST(T)                                                                              \
    template struct EAField<T>;                                                                    \
    template EAField<T> build_field<T>(const NormalForm<T>&);                                      \
    template EAField<T> field_from_inverse<T>(Case, const InverseParams<T>&, int);                 \
    template EAField<T> case1_field<T>(T, T, T);                                                   \
    template EAField<T> case1_from_ab<T>(T, T);                                                    \
    template EAField<T> case2_field<T>(T, T, T);                                                   \
    template EAField<T> case3_field<T>(T, T, T);                                                   \
    template EAField<T> case4_field<T>(T, T);                                                      \
    template Vec3<T> lax_rhs<T>(const Mat3<T>&, const Vec3<T>&);                                   \
    template AlgebraElement<T> lax_rhs<T>(const Mat3<T>&, const AlgebraElement<T>&);               \
    template Eigen::Matrix<T, 2, 3> integral_gradients<T>(const EAField<T>&, const Vec3<T>&);      \
    template FirstIntegrals<T> first_integrals<T>(const EAField<T>&, const Vec3<T>&);              \
    template GroupCurve<T> group_reconstruct<T>(const std::vector<Vec3<T>>&, double);

SLGEO_INST(double)
SLGEO_INST(cplx)

template struct EAField<long double>;
template FirstIntegrals<long double> first_integrals<long double>(const EAField<long double>&, const Vec3<long double>&);

} // namespace slgeo

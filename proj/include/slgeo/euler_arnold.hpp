#pragma once

#include "slgeo/normal_form.hpp"

#include <vector>

namespace slgeo {

// Quadratic Euler-Arnold field in the adapted basis, delta folded in as a global sign.
template <class T> struct EAField {
    Case kind = Case::One;
    T a{}, b{}, c{}; // case 1: a,b,c; cases 2,3: a,b
    T zeta{}, nu{};  // case 4
    int delta = 1;
    InverseParams<T> inv;

    Vec3<T> operator()(const Vec3<T>& z) const;
    Mat3<T> jacobian(const Vec3<T>& z) const;
    bool is_zero() const;
};

template <class T> struct FirstIntegrals {
    T I1{}, I2{};
};

template <class T> EAField<T> build_field(const NormalForm<T>& nf);
template <class T> EAField<T> field_from_inverse(Case kind, const InverseParams<T>& inv, int delta = 1);

// convenience constructors used by tests and scans
template <class T> EAField<T> case1_field(T nu1, T nu2, T nu3);
template <class T> EAField<T> case1_from_ab(T a, T b); // picks nu = (1-b, 1+a, 1)
template <class T> EAField<T> case2_field(T eta, T gamma, T zeta);
template <class T> EAField<T> case3_field(T eta, T nu, T zeta);
template <class T> EAField<T> case4_field(T nu, T zeta);

// widens the scalar type, e.g. to long double for solutions that outgrow double range
template <class U, class T> EAField<U> field_cast(const EAField<T>& f)
{
    EAField<U> g;
    g.kind = f.kind;
    g.a = U(f.a), g.b = U(f.b), g.c = U(f.c), g.zeta = U(f.zeta), g.nu = U(f.nu);
    g.delta = f.delta;
    for (int i = 0; i < 3; ++i)
        g.inv.nu3[i] = U(f.inv.nu3[i]);
    g.inv.eta = U(f.inv.eta), g.inv.gamma = U(f.inv.gamma), g.inv.nu = U(f.inv.nu), g.inv.zeta = U(f.inv.zeta);
    return g;
}

template <class T> Vec3<T> eval(const EAField<T>& f, const Vec3<T>& z) { return f(z); }

// [z, Phi^{-1} z] in standard coordinates
template <class T> Vec3<T> lax_rhs(const Mat3<T>& phi, const Vec3<T>& z);
template <class T> AlgebraElement<T> lax_rhs(const Mat3<T>& phi, const AlgebraElement<T>& z);

template <class T> FirstIntegrals<T> first_integrals(const EAField<T>& f, const Vec3<T>& z);
// gradients of I1 and I2 (rows)
template <class T> Eigen::Matrix<T, 2, 3> integral_gradients(const EAField<T>& f, const Vec3<T>& z);

template <class T> struct GroupCurve {
    std::vector<Mat2<T>> gamma;
    bool truncated = false; // non-finite x encountered; gamma stops before it
};

// integrates gamma' = gamma x(t) from gamma(0) = id; x sampled with uniform step h (standard coordinates)
template <class T> GroupCurve<T> group_reconstruct(const std::vector<Vec3<T>>& x, double h);

} // namespace slgeo

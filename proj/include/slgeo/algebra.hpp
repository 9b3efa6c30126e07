#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace slgeo {

using cplx = std::complex<double>;

template <class T> using Vec3 = Eigen::Matrix<T, 3, 1>;
template <class T> using Mat3 = Eigen::Matrix<T, 3, 3>;
template <class T> using Mat2 = Eigen::Matrix<T, 2, 2>;

template <class T> struct is_complex : std::false_type {};
template <class R> struct is_complex<std::complex<R>> : std::true_type {};
template <class T> inline constexpr bool is_complex_v = is_complex<T>::value;

enum class Field { Real, Complex };

template <class T> constexpr Field field_of() { return is_complex_v<T> ? Field::Complex : Field::Real; }

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// coordinates of z in some basis; basis 0 is the standard (e1,e2,e3)
template <class T> struct AlgebraElement {
    Vec3<T> coords = Vec3<T>::Zero();
    int basis_id = 0;
};

// Gram matrix of the Killing form on (e1,e2,e3)
Mat3<double> killing_gram();
// Gram matrix of the pseudo-orthonormal normalization
Mat3<double> pseudo_gram();

template <class T> Mat2<T> to_matrix(const Vec3<T>& z);
template <class T> Vec3<T> from_matrix(const Mat2<T>& m);

// bracket in standard coordinates
template <class T> Vec3<T> bracket(const Vec3<T>& x, const Vec3<T>& y);
template <class T> AlgebraElement<T> bracket(const AlgebraElement<T>& x, const AlgebraElement<T>& y);

// ad_x as a 3x3 matrix acting on standard coordinates
template <class T> Mat3<T> ad(const Vec3<T>& x);

template <class T> T killing(const Vec3<T>& x, const Vec3<T>& y);
template <class T> T killing(const AlgebraElement<T>& x, const AlgebraElement<T>& y);
// 2 Tr(xy) on the 2x2 matrices
template <class T> T killing_trace(const Vec3<T>& x, const Vec3<T>& y);
// 1/2 Tr(ad_x ad_y)
template <class T> T killing_ad(const Vec3<T>& x, const Vec3<T>& y);

template <class T> bool check_self_adjoint(const Mat3<T>& phi, double tol = 1e-9);

enum class BasisType { Orthonormal, PseudoOrthonormal, Neither };

struct BasisKind {
    BasisType kind = BasisType::Neither;
    int delta = 1;
    std::array<int, 3> order{0, 1, 2}; // reordering that realizes the normalization
};

// Gram of three vectors given in standard coordinates
template <class T> Mat3<T> gram(const Mat3<T>& cols);

// v_k are the columns of `cols` in standard coordinates
template <class T> BasisKind classify_basis(const Mat3<T>& cols, double tol = 1e-9);
template <class T>
BasisKind classify_basis(const Vec3<T>& v1, const Vec3<T>& v2, const Vec3<T>& v3, double tol = 1e-9);

std::string to_string(BasisType k);

} // namespace slgeo

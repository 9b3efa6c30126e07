#pragma once

#include "slgeo/euler_arnold.hpp"

#include <optional>
#include <vector>

namespace slgeo {

template <class T> using Vec2 = Eigen::Matrix<T, 2, 1>;

// Affine: z itself.  X = (z1/z3, z2/z3, 1/z3), Y = (z1/z2, z3/z2, 1/z2),
// U = (z3/z1, z2/z1, 1/z1), W = (1/z1, z2/z1, z3/z1).
enum class ChartId { Affine, X, Y, U, W };
std::string to_string(ChartId c);

template <class T> Vec3<T> to_chart(const Vec3<T>& p, ChartId from, ChartId to);

// index of the height coordinate inside the chart triple (-1 for Affine)
int height_index(ChartId c);

// pushforward of an Euler-Arnold field: chart velocity = bracket(p) / p(height_index)
template <class T> struct ChartField {
    ChartId chart = ChartId::Affine;
    EAField<T> f;

    Vec3<T> bracket(const Vec3<T>& p) const;
    Vec3<T> operator()(const Vec3<T>& p) const;
    // representative of the foliation at infinity (height = 0) in the two affine coordinates
    Vec2<T> at_infinity(const Vec2<T>& xi) const;
    Mat2<T> at_infinity_jacobian(const Vec2<T>& xi) const;
};

// only the case/chart pairs worked out explicitly are accepted
template <class T> ChartField<T> field_in_chart(const EAField<T>& f, ChartId chart);
bool chart_supported(Case kind, ChartId chart);

enum class SingularityKind { IdempotentType, AxisPoint, Saddle, Center, Degenerate };
std::string to_string(SingularityKind k);

struct InfinitySingularity {
    ChartId chart = ChartId::X;
    Vec2<double> coords = Vec2<double>::Zero();
    SingularityKind kind = SingularityKind::Degenerate;
};

std::vector<InfinitySingularity> infinity_singularities(const EAField<double>& f);

enum class Conic { Ellipse, Hyperbola, Parabola, Line, Degenerate };
std::string to_string(Conic c);

// how the leaf at infinity ends at one side of its parameter interval
enum class EndKind {
    NullPoint,     // singular point where both first integrals vanish (idempotent type)
    SingularPoint, // singular point off the null cone
    ChartBoundary, // the parametrization leaves the X chart
    None           // closed leaf without singular points
};
std::string to_string(EndKind k);

struct LeafAtInfinity {
    double K = 0; // I1/I2 at the direction (infinite when I2 = 0, NaN when both vanish)
    Conic conic = Conic::Degenerate;
    std::array<double, 5> coeffs{}; // A x1^2 + B x2^2 + D x1 + E x2 + F = 0 in the X chart, normalized
    bool in_chart = false;           // the direction has z3 != 0
    std::array<double, 2> param_bounds{}; // leaf interval around sigma0 (may be infinite)
    std::array<EndKind, 2> ends{EndKind::None, EndKind::None};
    double sigma0 = 0;

    // parametrization of the conic in the X chart
    enum class Shape { Line, Ellipse, HyperbolaX, HyperbolaY, ParabolaX, ParabolaY, None };
    Shape shape = Shape::None;
    Vec2<double> origin = Vec2<double>::Zero(), dir = Vec2<double>::Zero();
    double r1 = 0, r2 = 0;
    int branch = 1;

    Vec2<double> point(double s) const;
    Vec2<double> tangent(double s) const;
};

LeafAtInfinity leaf_at_infinity(const EAField<double>& f, const Vec3<double>& direction, double tol = 1e-9);

enum class LeafEnd { Lower = 0, Upper = 1 };

struct EscapeTime {
    bool finite = false;
    double value = 0; // signed time from z0 to the end; +-infinity when not finite
    EndKind kind = EndKind::None;
    double error = 0;
};

// time-form integral from z0 (z3 != 0, on the cone above leaf) to one end of the leaf.
// A finite value at a NullPoint end is the escape time; at a ChartBoundary end it is the
// time at which z3 changes sign, where the solution stays bounded.
EscapeTime escape_quadrature(const EAField<double>& f, const LeafAtInfinity& leaf, const Vec3<double>& z0, LeafEnd end);

} // namespace slgeo

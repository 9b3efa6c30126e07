#include "slgeo/charts.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>

namespace slgeo {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// homogeneous index k, affine indices (i, j), position of the height coordinate
struct ChartSpec {
    int k, i, j, hpos;
};

ChartSpec spec(ChartId c)
{
    switch (c) {
    case ChartId::X: return {2, 0, 1, 2};
    case ChartId::Y: return {1, 0, 2, 2};
    case ChartId::U: return {0, 2, 1, 2};
    case ChartId::W: return {0, 1, 2, 0};
    case ChartId::Affine: break;
    }
    throw Error("chart: affine chart has no spec");
}

template <class T> void split(const Vec3<T>& p, const ChartSpec& s, T& x0, T& x1, T& h)
{
    if (s.hpos == 2) {
        x0 = p(0), x1 = p(1), h = p(2);
    } else {
        h = p(0), x0 = p(1), x1 = p(2);
    }
}

template <class T> Vec3<T> pack(const ChartSpec& s, T x0, T x1, T h)
{
    return s.hpos == 2 ? Vec3<T>(x0, x1, h) : Vec3<T>(h, x0, x1);
}

template <class T> Vec3<T> affine_to(const Vec3<T>& z, ChartId c)
{
    if (c == ChartId::Affine)
        return z;
    const ChartSpec s = spec(c);
    if (z(s.k) == T(0))
        throw Error("to_chart: point lies on the forbidden plane of chart " + to_string(c));
    return pack<T>(s, z(s.i) / z(s.k), z(s.j) / z(s.k), T(1) / z(s.k));
}

template <class T> Vec3<T> to_affine(const Vec3<T>& p, ChartId c)
{
    if (c == ChartId::Affine)
        return p;
    const ChartSpec s = spec(c);
    T x0, x1, h;
    split(p, s, x0, x1, h);
    if (h == T(0))
        throw Error("to_chart: point lies at infinity of chart " + to_string(c));
    Vec3<T> z;
    z(s.k) = T(1) / h;
    z(s.i) = x0 / h;
    z(s.j) = x1 / h;
    return z;
}

template <class T> Vec3<T> lift(const ChartSpec& s, T x0, T x1)
{
    Vec3<T> m;
    m(s.k) = T(1);
    m(s.i) = x0;
    m(s.j) = x1;
    return m;
}

} // namespace

std::string to_string(ChartId c)
{
    switch (c) {
    case ChartId::Affine: return "affine";
    case ChartId::X: return "X";
    case ChartId::Y: return "Y";
    case ChartId::U: return "U";
    case ChartId::W: return "W";
    }
    return "?";
}

std::string to_string(SingularityKind k)
{
    switch (k) {
    case SingularityKind::IdempotentType: return "idempotent";
    case SingularityKind::AxisPoint: return "axis";
    case SingularityKind::Saddle: return "saddle";
    case SingularityKind::Center: return "center";
    case SingularityKind::Degenerate: return "degenerate";
    }
    return "?";
}

std::string to_string(Conic c)
{
    switch (c) {
    case Conic::Ellipse: return "ellipse";
    case Conic::Hyperbola: return "hyperbola";
    case Conic::Parabola: return "parabola";
    case Conic::Line: return "line";
    case Conic::Degenerate: return "degenerate";
    }
    return "?";
}

std::string to_string(EndKind k)
{
    switch (k) {
    case EndKind::NullPoint: return "null-point";
    case EndKind::SingularPoint: return "singular-point";
    case EndKind::ChartBoundary: return "chart-boundary";
    case EndKind::None: return "none";
    }
    return "?";
}

int height_index(ChartId c) { return c == ChartId::Affine ? -1 : spec(c).hpos; }

template <class T> Vec3<T> to_chart(const Vec3<T>& p, ChartId from, ChartId to)
{
    return affine_to<T>(to_affine<T>(p, from), to);
}

template <class T> Vec3<T> ChartField<T>::bracket(const Vec3<T>& p) const
{
    if (chart == ChartId::Affine)
        return f(p);
    const ChartSpec s = spec(chart);
    T x0, x1, h;
    split(p, s, x0, x1, h);
    const Vec3<T> E = f(lift(s, x0, x1));
    return pack<T>(s, E(s.i) - x0 * E(s.k), E(s.j) - x1 * E(s.k), -h * E(s.k));
}

template <class T> Vec3<T> ChartField<T>::operator()(const Vec3<T>& p) const
{
    if (chart == ChartId::Affine)
        return f(p);
    return bracket(p) / p(spec(chart).hpos);
}

template <class T> Vec2<T> ChartField<T>::at_infinity(const Vec2<T>& xi) const
{
    const ChartSpec s = spec(chart);
    const Vec3<T> E = f(lift(s, xi(0), xi(1)));
    return {E(s.i) - xi(0) * E(s.k), E(s.j) - xi(1) * E(s.k)};
}

template <class T> Mat2<T> ChartField<T>::at_infinity_jacobian(const Vec2<T>& xi) const
{
    const ChartSpec s = spec(chart);
    const Vec3<T> m = lift(s, xi(0), xi(1));
    const Vec3<T> E = f(m);
    const Mat3<T> J = f.jacobian(m);
    Mat2<T> D;
    D(0, 0) = J(s.i, s.i) - E(s.k) - xi(0) * J(s.k, s.i);
    D(0, 1) = J(s.i, s.j) - xi(0) * J(s.k, s.j);
    D(1, 0) = J(s.j, s.i) - xi(1) * J(s.k, s.i);
    D(1, 1) = J(s.j, s.j) - E(s.k) - xi(1) * J(s.k, s.j);
    return D;
}

bool chart_supported(Case kind, ChartId chart)
{
    if (chart == ChartId::Affine || chart == ChartId::X)
        return true;
    switch (kind) {
    case Case::One: return true;
    case Case::Three: return chart == ChartId::W;
    default: return false;
    }
}

template <class T> ChartField<T> field_in_chart(const EAField<T>& f, ChartId chart)
{
    if (!chart_supported(f.kind, chart))
        throw Error("field_in_chart: chart " + to_string(chart) + " is not available for case " + to_string(f.kind));
    return {chart, f};
}

// ---------------------------------------------------------------------------------------------
// singular points at infinity

namespace {

SingularityKind linear_kind(const Mat2<double>& D)
{
    const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
    const double det = D.determinant(), tr = D.trace();
    if (std::abs(det) <= 1e-12 * scale * scale)
        return SingularityKind::Degenerate;
    if (det < 0)
        return SingularityKind::Saddle;
    if (std::abs(tr) <= 1e-12 * scale)
        return SingularityKind::Center;
    return SingularityKind::AxisPoint;
}

// X-chart points whose rays are invariant with nonzero growth
std::vector<Vec2<double>> null_points(const EAField<double>& f)
{
    std::vector<Vec2<double>> out;
    auto both = [&](double x1sq, double x2) {
        if (x1sq > 0) {
            out.emplace_back(std::sqrt(x1sq), x2);
            out.emplace_back(-std::sqrt(x1sq), x2);
        }
    };
    switch (f.kind) {
    case Case::One:
        if (f.c != 0 && f.a / f.c > 0 && f.b / f.c > 0) {
            const double r1 = std::sqrt(f.a / f.c), r2 = std::sqrt(f.b / f.c);
            out = {{r1, r2}, {-r1, r2}, {-r1, -r2}, {r1, -r2}};
        }
        break;
    case Case::Two: {
        const double a = f.a, b = f.b;
        if (a == 0) {
            both(1.0, 0.0);
            break;
        }
        const double R = std::hypot(a, b);
        for (double x2 : {(-b + R) / a, (-b - R) / a}) {
            const double den = b + a * x2;
            if (den != 0)
                both(b * (x2 * x2 + 1) / den, x2);
        }
        break;
    }
    case Case::Three:
        if (f.a != 0)
            both(f.b / f.a, -f.b / (2 * f.a));
        break;
    case Case::Four:
        if (f.zeta * f.nu != 0)
            out.emplace_back(f.zeta * f.nu / 2, -f.zeta * f.zeta * f.nu * f.nu / 8);
        break;
    }
    return out;
}

} // namespace

std::vector<InfinitySingularity> infinity_singularities(const EAField<double>& f)
{
    std::vector<InfinitySingularity> out;
    if (f.is_zero())
        return out;
    const ChartField<double> X{ChartId::X, f};
    for (const auto& p : null_points(f))
        out.push_back({ChartId::X, p, SingularityKind::IdempotentType});
    if (f.kind == Case::One) {
        const Vec2<double> o = Vec2<double>::Zero();
        out.push_back({ChartId::X, o, linear_kind(X.at_infinity_jacobian(o))});
    }
    for (ChartId c : {ChartId::Y, ChartId::U}) {
        const ChartField<double> g{c, f};
        const Vec2<double> o = Vec2<double>::Zero();
        if (g.at_infinity(o).norm() <= 1e-12)
            out.push_back({c, o, linear_kind(g.at_infinity_jacobian(o))});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// leaves at infinity

Vec2<double> LeafAtInfinity::point(double s) const
{
    const double A = coeffs[0], B = coeffs[1], D = coeffs[2], E = coeffs[3], F = coeffs[4];
    switch (shape) {
    case Shape::Line: return origin + s * dir;
    case Shape::Ellipse: return origin + Vec2<double>(r1 * std::cos(s), r2 * std::sin(s));
    case Shape::HyperbolaX: return origin + Vec2<double>(branch * r1 * std::cosh(s), r2 * std::sinh(s));
    case Shape::HyperbolaY: return origin + Vec2<double>(r1 * std::sinh(s), branch * r2 * std::cosh(s));
    case Shape::ParabolaX: return {s, -(A * s * s + D * s + F) / E};
    case Shape::ParabolaY: return {-(B * s * s + E * s + F) / D, s};
    case Shape::None: break;
    }
    return origin;
}

Vec2<double> LeafAtInfinity::tangent(double s) const
{
    const double A = coeffs[0], B = coeffs[1], D = coeffs[2], E = coeffs[3];
    switch (shape) {
    case Shape::Line: return dir;
    case Shape::Ellipse: return {-r1 * std::sin(s), r2 * std::cos(s)};
    case Shape::HyperbolaX: return {branch * r1 * std::sinh(s), r2 * std::cosh(s)};
    case Shape::HyperbolaY: return {r1 * std::cosh(s), branch * r2 * std::sinh(s)};
    case Shape::ParabolaX: return {1.0, -(2 * A * s + D) / E};
    case Shape::ParabolaY: return {-(2 * B * s + E) / D, 1.0};
    case Shape::None: break;
    }
    return Vec2<double>::Zero();
}

namespace {

struct LeafGeometry {
    const EAField<double>& f;
    const LeafAtInfinity& leaf;
    ChartField<double> X{ChartId::X, f};

    // parameter velocity of the projected flow, in units of the time-form with height 1
    double speed(double s) const
    {
        const Vec2<double> t = leaf.tangent(s);
        return X.at_infinity(leaf.point(s)).dot(t) / t.squaredNorm();
    }
    Vec3<double> lifted(double s) const
    {
        const Vec2<double> p = leaf.point(s);
        return {p(0), p(1), 1.0};
    }
};

EndKind end_kind(const EAField<double>& f, const Vec3<double>& m)
{
    const auto I = first_integrals(f, m);
    const double qs = std::max(1.0, inverse_template<double>(f.kind, f.inv).cwiseAbs().maxCoeff());
    const double n2 = m.squaredNorm();
    return std::abs(I.I1) <= 1e-7 * n2 && std::abs(I.I2) <= 1e-7 * n2 * qs ? EndKind::NullPoint : EndKind::SingularPoint;
}

// first zero of the speed from s0 in direction dir
void find_end(const LeafGeometry& g, LeafAtInfinity& leaf, int side)
{
    const double dir = side == 0 ? -1 : 1;
    const double s0 = leaf.sigma0;
    const double v0 = g.speed(s0);
    std::vector<double> offsets;
    if (leaf.shape == LeafAtInfinity::Shape::Ellipse) {
        const int n = 4096;
        for (int k = 1; k <= n; ++k)
            offsets.push_back(2 * M_PI * k / n);
    } else {
        const bool hyp = leaf.shape == LeafAtInfinity::Shape::HyperbolaX || leaf.shape == LeafAtInfinity::Shape::HyperbolaY;
        const double scale = hyp ? 1.0 : 1.0 + std::abs(s0);
        const double top = hyp ? 40.0 : 1e8 * scale;
        for (double d = 1e-10 * scale; d < top; d *= 1.05)
            offsets.push_back(d);
        offsets.push_back(top);
    }
    double prev = 0;
    for (double d : offsets) {
        const double v = g.speed(s0 + dir * d);
        if ((v > 0) != (v0 > 0) || v == 0) {
            double lo = s0 + dir * prev, hi = s0 + dir * d;
            if (lo > hi)
                std::swap(lo, hi);
            std::uintmax_t it = 200;
            auto fn = [&](double s) { return g.speed(s); };
            const double flo = fn(lo), fhi = fn(hi);
            double root;
            if (flo == 0)
                root = lo;
            else if (fhi == 0)
                root = hi;
            else {
                auto r = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), it);
                root = (r.first + r.second) / 2;
            }
            leaf.param_bounds[side] = root;
            leaf.ends[side] = end_kind(g.f, g.lifted(root));
            return;
        }
        prev = d;
    }
    if (leaf.shape == LeafAtInfinity::Shape::Ellipse) {
        leaf.param_bounds = {-inf, inf};
        leaf.ends = {EndKind::None, EndKind::None};
        return;
    }
    leaf.param_bounds[side] = dir * inf;
    leaf.ends[side] = EndKind::ChartBoundary;
}

double sgn(double x) { return x < 0 ? -1.0 : 1.0; }

} // namespace

LeafAtInfinity leaf_at_infinity(const EAField<double>& f, const Vec3<double>& direction, double tol)
{
    if (direction.norm() == 0)
        throw Error("leaf_at_infinity: zero direction");
    const Vec3<double> z = direction / direction.norm();
    LeafAtInfinity leaf;
    const auto I = first_integrals(f, z);
    const Mat3<double> G = adapted_gram(f.kind);
    const Mat3<double> GQ = G * inverse_template<double>(f.kind, f.inv);
    const double qs = std::max(1.0, GQ.cwiseAbs().maxCoeff());
    if (std::abs(I.I1) <= tol && std::abs(I.I2) <= tol * qs) {
        leaf.K = std::nan("");
        return leaf;
    }
    leaf.K = I.I2 == 0 ? sgn(I.I1) * inf : I.I1 / I.I2;

    // level set I2(z0) I1(z) - I1(z0) I2(z) = 0
    Mat3<double> M = I.I2 * G - I.I1 * (GQ + GQ.transpose()) / 2;
    const double mmax = M.cwiseAbs().maxCoeff();
    if (mmax == 0)
        return leaf;
    M /= mmax;
    if (std::abs(M(0, 1)) > tol)
        throw Error("leaf_at_infinity: level set has a mixed x1 x2 term");
    auto clean = [&](double v) { return std::abs(v) <= tol ? 0.0 : v; };
    const double A = clean(M(0, 0)), B = clean(M(1, 1)), D = clean(2 * M(0, 2)), E = clean(2 * M(1, 2)),
                 F = clean(M(2, 2));
    leaf.coeffs = {A, B, D, E, F};

    using Shape = LeafAtInfinity::Shape;
    leaf.in_chart = std::abs(z(2)) > tol;
    const Vec2<double> xi = leaf.in_chart ? Vec2<double>(z(0) / z(2), z(1) / z(2)) : Vec2<double>::Zero();

    auto make_line = [&](const Vec2<double>& o, const Vec2<double>& d) {
        leaf.conic = Conic::Line;
        leaf.shape = Shape::Line;
        leaf.origin = o;
        leaf.dir = d.normalized();
        leaf.sigma0 = (xi - o).dot(leaf.dir);
    };

    if (A != 0 && B != 0) {
        const Vec2<double> c(-D / (2 * A), -E / (2 * B));
        const double Fp = A * c(0) * c(0) + B * c(1) * c(1) - F;
        leaf.origin = c;
        if (std::abs(Fp) <= tol) {
            leaf.conic = Conic::Line;
            if (leaf.in_chart && (xi - c).norm() > tol * (1 + xi.norm()))
                make_line(c, xi - c);
        } else if (A * B > 0) {
            leaf.conic = Fp / A > 0 ? Conic::Ellipse : Conic::Degenerate;
            if (leaf.conic == Conic::Ellipse) {
                leaf.shape = Shape::Ellipse;
                leaf.r1 = std::sqrt(Fp / A);
                leaf.r2 = std::sqrt(Fp / B);
                leaf.sigma0 = std::atan2((xi(1) - c(1)) / leaf.r2, (xi(0) - c(0)) / leaf.r1);
            }
        } else {
            leaf.conic = Conic::Hyperbola;
            if (Fp / A > 0) {
                leaf.shape = Shape::HyperbolaX;
                leaf.r1 = std::sqrt(Fp / A);
                leaf.r2 = std::sqrt(-Fp / B);
                leaf.branch = int(sgn(xi(0) - c(0)));
                leaf.sigma0 = std::asinh((xi(1) - c(1)) / leaf.r2);
            } else {
                leaf.shape = Shape::HyperbolaY;
                leaf.r1 = std::sqrt(-Fp / A);
                leaf.r2 = std::sqrt(Fp / B);
                leaf.branch = int(sgn(xi(1) - c(1)));
                leaf.sigma0 = std::asinh((xi(0) - c(0)) / leaf.r1);
            }
        }
    } else if (A != 0) {
        if (E != 0) {
            leaf.conic = Conic::Parabola;
            leaf.shape = Shape::ParabolaX;
            leaf.sigma0 = xi(0);
        } else {
            make_line(xi, Vec2<double>(0, 1));
        }
    } else if (B != 0) {
        if (D != 0) {
            leaf.conic = Conic::Parabola;
            leaf.shape = Shape::ParabolaY;
            leaf.sigma0 = xi(1);
        } else {
            make_line(xi, Vec2<double>(1, 0));
        }
    } else if (D != 0 || E != 0) {
        make_line(xi, Vec2<double>(-E, D));
    }

    if (!leaf.in_chart) {
        leaf.shape = Shape::None;
        leaf.param_bounds = {std::nan(""), std::nan("")};
        return leaf;
    }
    if (leaf.shape == Shape::None)
        return leaf;
    LeafGeometry g{f, leaf};
    const double v0 = g.speed(leaf.sigma0);
    if (std::abs(v0) <= tol * std::max(1.0, f(g.lifted(leaf.sigma0)).norm())) {
        leaf.shape = Shape::None; // the projection is a singular point
        return leaf;
    }
    find_end(g, leaf, 0);
    find_end(g, leaf, 1);
    return leaf;
}

EscapeTime escape_quadrature(const EAField<double>& f, const LeafAtInfinity& leaf, const Vec3<double>& z0, LeafEnd end)
{
    if (!leaf.in_chart || leaf.shape == LeafAtInfinity::Shape::None)
        throw Error("escape_quadrature: leaf has no parametrization in the X chart");
    if (z0(2) == 0)
        throw Error("escape_quadrature: z0 lies on the plane z3 = 0");
    const int side = int(end);
    const double dir = side == 0 ? -1 : 1;
    const double s0 = leaf.sigma0, se = leaf.param_bounds[side];
    LeafGeometry g{f, leaf};

    // height x3 = 1/z3 follows a first integral: I(z) = z3^2 I(m)
    const Vec3<double> m0 = g.lifted(s0);
    const auto I0 = first_integrals(f, m0);
    const double qs = std::max(1.0, inverse_template<double>(f.kind, f.inv).cwiseAbs().maxCoeff());
    const bool use1 = std::abs(I0.I1) * qs >= std::abs(I0.I2);
    const double q0 = use1 ? I0.I1 : I0.I2;
    const double h0 = 1 / z0(2);
    auto q = [&](double s) {
        const auto I = first_integrals(f, g.lifted(s));
        return use1 ? I.I1 : I.I2;
    };
    auto integrand = [&](double s) { return h0 * std::sqrt(std::max(0.0, q(s) / q0)) / g.speed(s); };

    EscapeTime out;
    out.kind = leaf.ends[side];
    const double orientation = dir * sgn(integrand(s0));
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    switch (out.kind) {
    case EndKind::None:
    case EndKind::SingularPoint:
        out.value = orientation * inf;
        return out;
    case EndKind::NullPoint: {
        // the substituted integrand tends to a constant; hold it below umin where rounding gives 0/0
        const double L = std::sqrt(std::abs(se - s0)), umin = 1e-6 * L;
        auto fu = [&](double u) {
            u = std::max(u, umin);
            return 2 * u * integrand(se - dir * u * u);
        };
        out.value = dir * GK::integrate(fu, 0.0, L, 15, 1e-12, &out.error);
        out.finite = true;
        return out;
    }
    case EndKind::ChartBoundary: {
        // decay exponent of the time-form against the distance |H| far out
        const bool hyp = leaf.shape == LeafAtInfinity::Shape::HyperbolaX || leaf.shape == LeafAtInfinity::Shape::HyperbolaY;
        const double scale = hyp ? 1.0 : 1.0 + std::abs(s0);
        const double s1 = s0 + dir * (hyp ? 15.0 : 1e4 * scale), s2 = s0 + dir * (hyp ? 30.0 : 1e6 * scale);
        auto radial = [&](double s) {
            const Vec2<double> p = leaf.point(s), t = leaf.tangent(s);
            return std::abs(integrand(s)) * p.norm() / std::abs(p.dot(t));
        };
        const double r1 = leaf.point(s1).norm(), r2 = leaf.point(s2).norm();
        const double p = -std::log(radial(s2) / radial(s1)) / std::log(r2 / r1);
        if (!(p > 1.5)) {
            out.value = orientation * inf;
            return out;
        }
        // past s1 the decay is verified, so an overflowing parametrization contributes nothing
        const double v1 = std::abs(s1 - s0);
        auto fv = [&](double v) {
            const double r = integrand(s0 + dir * v);
            return std::isfinite(r) || v < v1 ? r : 0.0;
        };
        out.value = dir * GK::integrate(fv, 0.0, inf, 15, 1e-12, &out.error);
        out.finite = true;
        return out;
    }
    }
    return out;
}

#define SLGEO_INST(T)                                                                                   \
    template Vec3<T> to_chart<T>(const Vec3<T>&, ChartId, ChartId);                                      \
    template struct ChartField<T>;                                                                      \
    template ChartField<T> field_in_chart<T>(const EAField<T>&, ChartId);

SLGEO_INST(double)
SLGEO_INST(cplx)

} // namespace slgeo

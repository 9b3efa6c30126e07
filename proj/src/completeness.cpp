#include "slgeo/completeness.hpp"
#include "slgeo/charts.hpp"

#include <cmath>
#include <limits>

namespace slgeo {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

template <class T> bool admissible_square(const T& x)
{
    if constexpr (is_complex_v<T>)
        return x != T(0);
    else
        return x > 0;
}

template <class T> std::vector<Vec3<T>> candidate_sections(const EAField<T>& f)
{
    std::vector<Vec3<T>> out;
    auto pair = [&](T x1sq, T x2) {
        if (!admissible_square(x1sq))
            return;
        const T r = std::sqrt(x1sq);
        out.push_back(Vec3<T>(r, x2, T(1)));
        out.push_back(Vec3<T>(-r, x2, T(1)));
    };
    switch (f.kind) {
    case Case::One:
        if (f.c != T(0) && admissible_square<T>(f.a / f.c) && admissible_square<T>(f.b / f.c)) {
            const T r1 = std::sqrt(f.a / f.c), r2 = std::sqrt(f.b / f.c);
            out = {Vec3<T>(r1, r2, T(1)), Vec3<T>(-r1, r2, T(1)), Vec3<T>(-r1, -r2, T(1)), Vec3<T>(r1, -r2, T(1))};
        }
        break;
    case Case::Two: {
        if (f.b == T(0))
            break;
        if (f.a == T(0)) {
            pair(T(1), T(0));
            break;
        }
        const T R = std::sqrt(f.a * f.a + f.b * f.b);
        for (T x2 : {(-f.b + R) / f.a, (-f.b - R) / f.a}) {
            const T den = f.b + f.a * x2;
            if (den != T(0))
                pair(f.b * (x2 * x2 + T(1)) / den, x2);
        }
        break;
    }
    case Case::Three:
        if (f.a != T(0))
            pair(f.b / f.a, -f.b / (2.0 * f.a));
        break;
    case Case::Four: {
        const T zn = f.zeta * f.nu;
        if (zn * f.nu != T(0))
            out.push_back(Vec3<T>(zn / 2.0, -zn * zn / 8.0, T(1)));
        break;
    }
    }
    return out;
}

double field_scale(const EAField<double>& f)
{
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            s = std::max(s, f(Vec3<double>::Unit(i) + Vec3<double>::Unit(j)).norm());
    return s;
}

GeodesicVerdict half(double t_star, std::string rule)
{
    GeodesicVerdict v;
    v.cls = GeodesicClass::HalfComplete;
    v.rule = std::move(rule);
    if (t_star > 0) {
        v.complete_side = TimeSide::Past;
        v.endpoints = std::array<double, 2>{-inf, t_star};
    } else {
        v.complete_side = TimeSide::Future;
        v.endpoints = std::array<double, 2>{t_star, inf};
    }
    return v;
}

GeodesicVerdict whole(GeodesicClass c, std::string rule)
{
    GeodesicVerdict v;
    v.cls = c;
    v.rule = std::move(rule);
    v.endpoints = std::array<double, 2>{-inf, inf};
    return v;
}

// half-complete leaf: the finite end is the null point of its leaf at infinity
GeodesicVerdict half_from_leaf(const EAField<double>& f, const Vec3<double>& z, double tol, std::string rule)
{
    const auto leaf = leaf_at_infinity(f, z, tol);
    if (leaf.in_chart && leaf.shape != LeafAtInfinity::Shape::None) {
        int nulls = 0, side = 0;
        for (int k = 0; k < 2; ++k)
            if (leaf.ends[k] == EndKind::NullPoint)
                ++nulls, side = k;
        if (nulls == 1) {
            const auto e = escape_quadrature(f, leaf, z, LeafEnd(side));
            if (e.finite)
                return half(e.value, std::move(rule));
        }
    }
    // side from direct integration when the leaf is not resolved in the X chart
    const auto ends = estimate_endpoints(f, z, 1e3);
    auto v = half(std::isfinite(ends[1]) ? ends[1] : ends[0], rule + " (side from integration)");
    v.extrapolated = true;
    return v;
}

GeodesicVerdict bounded_from_leaf(const EAField<double>& f, const Vec3<double>& z, double tol, std::string rule)
{
    GeodesicVerdict v;
    v.cls = GeodesicClass::BoundedInterval;
    v.rule = std::move(rule);
    const auto leaf = leaf_at_infinity(f, z, tol);
    if (!leaf.in_chart || leaf.shape == LeafAtInfinity::Shape::None)
        return v;
    v.extrapolated = leaf.conic == Conic::Hyperbola;
    std::array<double, 2> t{};
    bool explicit_ends = true;
    for (int k = 0; k < 2; ++k) {
        const auto e = escape_quadrature(f, leaf, z, LeafEnd(k));
        if (!e.finite || e.kind != EndKind::NullPoint) {
            explicit_ends = false;
            v.extrapolated = true;
        }
        t[k] = e.value;
    }
    if (explicit_ends)
        v.endpoints = std::array<double, 2>{std::min(t[0], t[1]), std::max(t[0], t[1])};
    return v;
}

bool near(double lhs, double rhs, double scale, double tol) { return std::abs(lhs - rhs) <= tol * scale; }

} // namespace

std::string to_string(GeodesicClass c)
{
    switch (c) {
    case GeodesicClass::PointGeodesic: return "PointGeodesic";
    case GeodesicClass::Complete: return "Complete";
    case GeodesicClass::HalfComplete: return "HalfComplete";
    case GeodesicClass::BoundedInterval: return "BoundedInterval";
    case GeodesicClass::NotImplemented: return "NotImplemented";
    }
    return "?";
}

std::string to_string(TimeSide s) { return s == TimeSide::Future ? "future" : "past"; }

std::string to_string(CausalType c)
{
    switch (c) {
    case CausalType::Spacelike: return "spacelike";
    case CausalType::Null: return "null";
    case CausalType::Timelike: return "timelike";
    }
    return "?";
}

MetricVerdict metric_verdict(const NormalForm<double>& nf)
{
    const auto q = invert_params(nf);
    MetricVerdict v;
    switch (nf.kind) {
    case Case::One: {
        const double crit = (q.nu3[1] - q.nu3[2]) * (q.nu3[2] - q.nu3[0]);
        v.complete = crit <= 0;
        v.criterion_value = crit;
        v.criterion_id = "case1 (nu2-nu3)(nu3-nu1) <= 0";
        break;
    }
    case Case::Three: {
        const double crit = (q.eta - q.nu) * q.zeta;
        v.complete = crit <= 0;
        v.criterion_value = crit;
        v.criterion_id = "case3 (eta-nu) zeta <= 0";
        break;
    }
    case Case::Two:
        v.complete = false;
        v.criterion_id = "case2 always incomplete";
        break;
    case Case::Four:
        v.complete = false;
        v.criterion_id = "case4 always incomplete";
        break;
    }
    return v;
}

MetricVerdict metric_verdict(const NormalForm<cplx>& nf)
{
    int geo = 0;
    for (const auto& e : nf.spectrum.eigenvalues)
        geo = std::max(geo, e.geo_mult);
    MetricVerdict v;
    v.complete = geo >= 2;
    v.criterion_value = geo;
    v.criterion_id = "complex eigenspace dimension >= 2";
    return v;
}

template <class T> std::vector<IdempotentRay<T>> find_idempotents(const EAField<T>& f)
{
    std::vector<IdempotentRay<T>> out;
    if (f.is_zero())
        return out;
    for (const auto& w : candidate_sections(f)) {
        const Vec3<T> fw = f(w);
        const T kappa = fw(2);
        if (std::abs(kappa) <= 1e-14 * std::max(1.0, double(fw.norm())))
            continue;
        IdempotentRay<T> r;
        r.section = w;
        r.kappa = kappa;
        r.residual = double((fw - kappa * w).norm());
        if (r.residual > 1e-10 * std::max(1.0, double(fw.norm())))
            throw Error("find_idempotents: section fails certification, residual " + std::to_string(r.residual));
        const double n = double(w.norm());
        r.direction = w / n;
        r.kappa_unit = kappa / n;
        out.push_back(r);
    }
    return out;
}

template <class T> T blowup_time(const IdempotentRay<T>& ray, T s0)
{
    if (s0 == T(0))
        throw Error("blowup_time: s0 = 0 is a fixed point");
    if (ray.kappa == T(0))
        throw Error("blowup_time: kappa = 0");
    return T(1) / (ray.kappa * s0);
}

GeodesicVerdict geodesic_verdict(const EAField<double>& f, const Vec3<double>& z0, double tol)
{
    const double n = z0.norm();
    if (n == 0 || f.is_zero())
        return whole(GeodesicClass::PointGeodesic, "field vanishes at z0");
    const Vec3<double> u = z0 / n;
    if (f(u).norm() <= tol * field_scale(f))
        return whole(GeodesicClass::PointGeodesic, "field vanishes at z0");

    for (const auto& ray : find_idempotents(f)) {
        for (double s : {1.0, -1.0}) {
            if ((u - s * ray.direction).norm() <= tol) {
                const double s0 = z0.dot(ray.section) / ray.section.squaredNorm();
                return half(blowup_time(ray, s0), "idempotent ray");
            }
        }
    }

    const double a = f.a, b = f.b, c = f.c;
    const double u1 = u(0) * u(0), u2 = u(1) * u(1), u3 = u(2) * u(2);
    switch (f.kind) {
    case Case::One:
        if (a * b <= 0)
            return whole(GeodesicClass::Complete, "case1 ab <= 0");
        if (near(b * u1, a * u2, std::abs(a) + std::abs(b), tol))
            return (c / a) * u1 < u3 ? half_from_leaf(f, z0, tol, "case1 plane b z1^2 = a z2^2, inside")
                                     : bounded_from_leaf(f, z0, tol, "case1 plane b z1^2 = a z2^2, outside");
        if (near(b * u3, c * u2, std::abs(b) + std::abs(c), tol))
            return (c / a) * u1 > u3 ? half_from_leaf(f, z0, tol, "case1 plane c z2^2 = b z3^2, outside")
                                     : bounded_from_leaf(f, z0, tol, "case1 plane c z2^2 = b z3^2, inside");
        if (near(a * u3, c * u1, std::abs(a) + std::abs(c), tol))
            return (c / b) * u2 > u3 ? half_from_leaf(f, z0, tol, "case1 plane c z1^2 = a z3^2, outside")
                                     : bounded_from_leaf(f, z0, tol, "case1 plane c z1^2 = a z3^2, inside");
        return bounded_from_leaf(f, z0, tol, "case1 generic leaf");
    case Case::Three:
        if (a * b <= 0)
            return whole(GeodesicClass::Complete, "case3 ab <= 0");
        if (u3 <= tol * tol)
            return whole(GeodesicClass::Complete, "case3 plane z3 = 0");
        if ((b / a) * u3 > u1)
            return bounded_from_leaf(f, z0, tol, "case3 strip |z1| < sqrt(b/a) |z3|");
        return half_from_leaf(f, z0, tol, "case3 outside the strip");
    case Case::Two: {
        if (a == 0 || b < 0) {
            GeodesicVerdict v;
            v.cls = GeodesicClass::NotImplemented;
            v.rule = "case2 with a = 0 or b < 0 has no per-geodesic description";
            return v;
        }
        const double R = std::hypot(a, b);
        const double rm = (-b - R) / a, rp = (-b + R) / a, rho1 = std::sqrt(2 * b * (R - b)) / std::abs(a);
        if (near(u(1), rm * u(2), 1 + std::abs(rm), tol))
            return whole(GeodesicClass::Complete, "case2 plane z2 = (-b-R)/a z3");
        if (near(u(1), rp * u(2), 1 + std::abs(rp), tol))
            return u1 > rho1 * rho1 * u3 ? half_from_leaf(f, z0, tol, "case2 plane z2 = (-b+R)/a z3, off the segment")
                                         : bounded_from_leaf(f, z0, tol, "case2 plane z2 = (-b+R)/a z3, segment");
        return bounded_from_leaf(f, z0, tol, "case2 generic leaf");
    }
    case Case::Four: {
        if (u3 <= tol * tol)
            return whole(GeodesicClass::Complete, "case4 plane z3 = 0");
        const double k = f.delta * f.zeta * f.nu * f.nu;
        return half(-1 / (k * z0(2)), "case4 z3(t) = z3/(1 + k z3 t)");
    }
    }
    return {};
}

GeodesicVerdict geodesic_verdict(const NormalForm<double>& nf, const Vec3<double>& z0, double tol)
{
    return geodesic_verdict(build_field(nf), Vec3<double>(nf.P.inverse() * z0), tol);
}

std::array<double, 2> estimate_endpoints(const EAField<double>& f, const Vec3<double>& z0, double horizon,
                                         const IntegratorOptions& opts)
{
    IntegratorOptions o = opts;
    o.keep_samples = false;
    std::array<double, 2> out{};
    for (int k = 0; k < 2; ++k) {
        const double end = k == 0 ? -horizon : horizon;
        const auto tr = integrate(f, z0, {0.0, end}, o);
        switch (tr.termination) {
        case Termination::BlowUp:
        case Termination::StepCollapse: out[k] = tr.t_est; break;
        default: out[k] = k == 0 ? -inf : inf; break;
        }
    }
    return out;
}

CausalType causal_type(const EAField<double>& f, const Vec3<double>& z0, double tol)
{
    const double I2 = first_integrals(f, z0).I2;
    const double scale = z0.squaredNorm() * std::max(1.0, inverse_template<double>(f.kind, f.inv).cwiseAbs().maxCoeff());
    if (std::abs(I2) <= tol * scale)
        return CausalType::Null;
    return I2 > 0 ? CausalType::Spacelike : CausalType::Timelike;
}

CausalType causal_type(const NormalForm<double>& nf, const Vec3<double>& z0, double tol)
{
    return causal_type(build_field(nf), Vec3<double>(nf.P.inverse() * z0), tol);
}

CompleteMetric build_complete_metric(int r)
{
    CompleteMetric m;
    switch (r) {
    case 0: m.nu = {2, 3, 0.5}; break;
    case 1: m.nu = {2, 3, -1}; break;
    case -1: m.nu = {-2, -3, -0.5}, m.sign = -1; break;
    case -2: m.nu = {-2, -3, 1}, m.sign = -1; break;
    default: throw Error("build_complete_metric: shift must be 0 or 1 (or -1, -2 for the mirrored metric)");
    }
    // J = sign I2 - I1 with I1 = z1^2 + z2^2 - z3^2, I2 = nu1 z1^2 + nu2 z2^2 - nu3 z3^2
    m.J = {m.sign * m.nu[0] - 1, m.sign * m.nu[1] - 1, 1 - m.sign * m.nu[2]};
    for (double j : m.J)
        if (!(j > 0))
            throw Error("build_complete_metric: J is not positive definite");
    return m;
}

template std::vector<IdempotentRay<double>> find_idempotents<double>(const EAField<double>&);
template std::vector<IdempotentRay<cplx>> find_idempotents<cplx>(const EAField<cplx>&);
template double blowup_time<double>(const IdempotentRay<double>&, double);
template cplx blowup_time<cplx>(const IdempotentRay<cplx>&, cplx);

} // namespace slgeo

#include "slgeo/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slgeo {

void validate(const IntegratorOptions& o)
{
    if (!(o.rel_tol > 0) || !(o.abs_tol > 0))
        throw Error("integrator: tolerances must be positive");
    if (!(o.max_norm > 0) || !(o.min_step > 0) || o.max_steps <= 0)
        throw Error("integrator: invalid blow-up thresholds");
}

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::SpanCompleted: return "SpanCompleted";
    case Termination::BlowUp: return "BlowUp";
    case Termination::StepCollapse: return "StepCollapse";
    case Termination::MaxSteps: return "MaxSteps";
    }
    return "?";
}

template <class T> Vec3<T> Trajectory<T>::dense(double s) const
{
    if (samples.empty())
        throw Error("dense: empty trajectory");
    if (s <= samples.front().s)
        return samples.front().z;
    if (s >= samples.back().s)
        return samples.back().z;
    auto it = std::upper_bound(samples.begin(), samples.end(), s,
                               [](double v, const Sample<T>& x) { return v < x.s; });
    const Sample<T>& b = *it;
    const Sample<T>& a = *(it - 1);
    const double h = b.s - a.s, u = (s - a.s) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u), h01 = u * u * (3 - 2 * u),
                 h11 = u * u * (u - 1);
    return h00 * a.z + (h10 * h) * a.dz + h01 * b.z + (h11 * h) * b.dz;
}

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// magnitudes in the precision of the state
template <class T> using real_of = decltype(std::abs(T{}));

template <class T> real_of<T> norm3(const Vec3<T>& v) { return v.norm(); }

template <class T> bool finite3(const Vec3<T>& v)
{
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(std::abs(v(i))))
            return false;
    return true;
}

template <class T> struct IntegralMonitor {
    bool active = false;
    Mat3<T> G, GQ;
    T I1_0{}, I2_0{};
    double d1 = 0, d2 = 0;

    void init(const EAField<T>* f, const Vec3<T>& z0)
    {
        if (!f)
            return;
        active = true;
        G = adapted_gram(f->kind).template cast<T>();
        GQ = G * inverse_template<T>(f->kind, f->inv);
        I1_0 = (z0.transpose() * G * z0)(0);
        I2_0 = (z0.transpose() * GQ * z0)(0);
    }
    void update(const Vec3<T>& z)
    {
        if (!active)
            return;
        const T i1 = (z.transpose() * G * z)(0), i2 = (z.transpose() * GQ * z)(0);
        using R = real_of<T>;
        d1 = std::max(d1, double(std::abs(i1 - I1_0) / std::max(R(1), std::abs(I1_0))));
        d2 = std::max(d2, double(std::abs(i2 - I2_0) / std::max(R(1), std::abs(I2_0))));
    }
};

// fit 1/|z| = alpha + beta (s - s_last) over the ring; returns the root in s, or NaN
double extrapolate_pole(const std::vector<std::pair<double, double>>& ring, double h)
{
    const size_t n = ring.size();
    if (n < 3)
        return std::nan("");
    const double s_last = ring.back().first;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [s, y] : ring) {
        const double x = s - s_last;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (!(den > 0))
        return std::nan("");
    const double beta = (n * sxy - sx * sy) / den, alpha = (sy - beta * sx) / n;
    if (!(beta < 0) || !(alpha > 0))
        return std::nan("");
    double worst = 0;
    for (const auto& [s, y] : ring)
        worst = std::max(worst, std::abs(alpha + beta * (s - s_last) - y));
    if (worst > 1e-3 * std::max(alpha, std::abs(ring.front().second)))
        return std::nan("");
    const double ds = -alpha / beta;
    if (ds > 1e6 * h)
        return std::nan("");
    return s_last + ds;
}

template <class T, class Rhs>
Trajectory<T> run(const Rhs& g, const EAField<T>* field, const Vec3<T>& z0, T t0, T dir, double L,
                  const IntegratorOptions& opts)
{
    validate(opts);
    if (!(L >= 0) || !std::isfinite(L))
        throw Error("integrate: invalid time span");
    if (!finite3<T>(z0))
        throw Error("integrate: non-finite initial condition");

    using R = real_of<T>;
    using S = std::conditional_t<std::is_same_v<R, long double>, long double, double>;
    Trajectory<T> tr;
    IntegralMonitor<T> mon;
    mon.init(field, z0);

    Vec3<T> z = z0, k1 = g(z0);
    double s = 0;
    R znorm_max = norm3<T>(z);
    tr.max_norm = double(znorm_max);
    if (opts.keep_samples)
        tr.samples.push_back({0.0, t0, z, k1});
    std::vector<std::pair<double, double>> ring;
    ring.reserve(10);
    auto push_ring = [&](double sv, R nz) {
        if (ring.size() == 10)
            ring.erase(ring.begin());
        ring.emplace_back(sv, double(1 / nz));
    };
    push_ring(0, std::max(znorm_max, R(1e-300)));

    auto finish = [&](Termination term, double s_est) {
        tr.termination = term;
        tr.t_end = t0 + dir * s;
        tr.t_est = t0 + dir * s_est;
        tr.z_end = z;
        tr.drift_I1 = mon.d1;
        tr.drift_I2 = mon.d2;
        tr.integral_drift = std::max(mon.d1, mon.d2);
        if (!opts.keep_samples)
            tr.samples.push_back({s, tr.t_end, z, g(z)});
        return tr;
    };

    if (L == 0)
        return finish(Termination::SpanCompleted, 0);

    // initial step (Hairer-Wanner heuristic)
    double h;
    {
        const R sc = opts.abs_tol + opts.rel_tol * norm3<T>(z);
        const R d0 = norm3<T>(z) / sc, d1 = norm3<T>(k1) / sc;
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : double(0.01 * d0 / d1);
        h0 = std::min(h0, L);
        const Vec3<T> z1 = z + S(h0) * k1;
        const R d2 = norm3<T>(Vec3<T>(g(z1) - k1)) / sc / h0;
        const double m = double(std::max(d1, d2));
        const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
        h = std::min({100 * h0, h1, L});
    }

    double facold = 1e-4;
    const double beta = 0.04, expo = 0.2 - beta * 0.75, safe = 0.9;
    bool last_rejected = false;

    while (true) {
        if (tr.steps + tr.rejected >= opts.max_steps)
            return finish(Termination::MaxSteps, s);
        bool final_step = false;
        if (s + h >= L) {
            h = L - s;
            final_step = true;
        }

        const Vec3<T> k2 = g(z + S(h) * (S(a21) * k1));
        const Vec3<T> k3 = g(z + S(h) * (S(a31) * k1 + S(a32) * k2));
        const Vec3<T> k4 = g(z + S(h) * (S(a41) * k1 + S(a42) * k2 + S(a43) * k3));
        const Vec3<T> k5 = g(z + S(h) * (S(a51) * k1 + S(a52) * k2 + S(a53) * k3 + S(a54) * k4));
        const Vec3<T> k6 = g(z + S(h) * (S(a61) * k1 + S(a62) * k2 + S(a63) * k3 + S(a64) * k4 + S(a65) * k5));
        const Vec3<T> zn = z + S(h) * (S(a71) * k1 + S(a73) * k3 + S(a74) * k4 + S(a75) * k5 + S(a76) * k6);
        const Vec3<T> k7 = g(zn);
        const Vec3<T> err = S(h) * (S(e1) * k1 + S(e3) * k3 + S(e4) * k4 + S(e5) * k5 + S(e6) * k6 + S(e7) * k7);

        double en = 0;
        for (int i = 0; i < 3; ++i) {
            const R sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(z(i)), std::abs(zn(i)));
            const double r = double(std::abs(err(i)) / sc);
            en += r * r;
        }
        en = std::sqrt(en / 3);

        if (!std::isfinite(en)) {
            ++tr.rejected;
            h *= 0.2;
            last_rejected = true;
            if (h < opts.min_step) {
                const double se = extrapolate_pole(ring, h);
                if (znorm_max > opts.max_norm && std::isfinite(se))
                    return finish(Termination::BlowUp, se);
                return finish(Termination::StepCollapse, s);
            }
            continue;
        }

        if (en <= 1.0) {
            const double fac11 = std::pow(en, expo);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::clamp(fac / safe, 1.0 / 10.0, 1.0 / 0.2);
            double hnew = h / fac;
            if (last_rejected)
                hnew = std::min(hnew, h);
            facold = std::max(en, 1e-4);

            const double h_acc = h;
            s = final_step ? L : s + h;
            z = zn;
            k1 = k7;
            ++tr.steps;
            last_rejected = false;
            const R nz = norm3<T>(z);
            znorm_max = std::max(znorm_max, nz);
            tr.max_norm = double(znorm_max);
            mon.update(z);
            if (opts.keep_samples)
                tr.samples.push_back({s, t0 + dir * s, z, k1});
            push_ring(s, nz);

            if (final_step)
                return finish(Termination::SpanCompleted, s);
            if (h_acc < opts.min_step) {
                const double se = extrapolate_pole(ring, h_acc);
                if (nz > opts.max_norm && std::isfinite(se))
                    return finish(Termination::BlowUp, se);
                return finish(Termination::StepCollapse, s);
            }
            h = hnew;
        } else {
            const double fac11 = std::pow(en, expo);
            h /= std::min(1.0 / 0.2, fac11 / safe);
            ++tr.rejected;
            last_rejected = true;
            if (h < opts.min_step) {
                const double se = extrapolate_pole(ring, h);
                if (norm3<T>(z) > opts.max_norm && std::isfinite(se))
                    return finish(Termination::BlowUp, se);
                return finish(Termination::StepCollapse, s);
            }
        }
    }
}

} // namespace

template <class T>
Trajectory<T> integrate(const EAField<T>& f, const Vec3<T>& z0, std::array<double, 2> span,
                        const IntegratorOptions& opts)
{
    if (!std::isfinite(span[0]) || !std::isfinite(span[1]))
        throw Error("integrate: invalid time span");
    const double dir = span[1] >= span[0] ? 1.0 : -1.0;
    const T d(dir);
    auto g = [&](const Vec3<T>& z) -> Vec3<T> { return d * f(z); };
    return run<T>(g, &f, z0, T(span[0]), d, std::abs(span[1] - span[0]), opts);
}

template <class T>
Trajectory<T> integrate_rhs(const std::function<Vec3<T>(const Vec3<T>&)>& rhs, const Vec3<T>& z0,
                            std::array<double, 2> span, const IntegratorOptions& opts)
{
    if (!std::isfinite(span[0]) || !std::isfinite(span[1]))
        throw Error("integrate: invalid time span");
    const T d(span[1] >= span[0] ? 1.0 : -1.0);
    auto g = [&](const Vec3<T>& z) -> Vec3<T> { return d * rhs(z); };
    return run<T>(g, static_cast<const EAField<T>*>(nullptr), z0, T(span[0]), d, std::abs(span[1] - span[0]),
                  opts);
}

Trajectory<cplx> integrate_complex_segment(const EAField<cplx>& f, const Vec3<cplx>& z0, cplx t0, cplx t1,
                                           const IntegratorOptions& opts)
{
    const double L = std::abs(t1 - t0);
    const cplx d = L > 0 ? (t1 - t0) / L : cplx(1);
    auto g = [&](const Vec3<cplx>& z) -> Vec3<cplx> { return d * f(z); };
    return run<cplx>(g, &f, z0, t0, d, L, opts);
}

Trajectory<cplx> integrate_complex_ray(const EAField<cplx>& f, const Vec3<cplx>& z0, const RayPath& path,
                                       const IntegratorOptions& opts)
{
    if (!(path.r_max >= 0))
        throw Error("integrate_complex_ray: r_max must be non-negative");
    return integrate_complex_segment(f, z0, 0.0, std::polar(path.r_max, path.theta), opts);
}

double monodromy_loop(const EAField<cplx>& f, const Vec3<cplx>& z0, const LoopPath& path,
                      const IntegratorOptions& opts)
{
    const auto& v = path.vertices;
    if (v.empty())
        throw Error("monodromy_loop: empty path");
    if (std::abs(v.front() - v.back()) > 1e-14 * std::max(1.0, std::abs(v.front())))
        throw Error("monodromy_loop: path is not closed");
    IntegratorOptions o = opts;
    o.keep_samples = false;
    Vec3<cplx> z = z0;
    for (size_t k = 0; k + 1 < v.size(); ++k) {
        if (v[k] == v[k + 1])
            continue;
        auto tr = integrate_complex_segment(f, z, v[k], v[k + 1], o);
        if (tr.termination != Termination::SpanCompleted) {
            std::ostringstream os;
            os << "monodromy_loop: " << to_string(tr.termination) << " on segment " << k << " (" << v[k] << " -> "
               << v[k + 1] << "), estimated singular time " << tr.t_est;
            throw Error(os.str());
        }
        z = tr.z_end;
    }
    return (z - z0).norm();
}

LoopPath square_loop(cplx base, cplx center, double side)
{
    const double r = side / 2;
    LoopPath p;
    p.vertices = {base, center + cplx(r, -r), center + cplx(r, r), center + cplx(-r, r), center + cplx(-r, -r),
                  center + cplx(r, -r), base};
    return p;
}

LoopPath circle_loop(cplx base, cplx center, double radius, int n)
{
    LoopPath p;
    p.vertices.push_back(base);
    const double phase = std::arg(base - center);
    for (int k = 0; k <= n; ++k)
        p.vertices.push_back(center + std::polar(radius, phase + 2 * M_PI * k / n));
    p.vertices.push_back(base);
    return p;
}

#define SLGEO_INST(T)                                                                              \
    template struct Trajectory<T>;                                                                 \
    template Trajectory<T> integrate<T>(const EAField<T>&, const Vec3<T>&, std::array<double, 2>,  \
                                        const IntegratorOptions&);                                 \
    template Trajectory<T> integrate_rhs<T>(const std::function<Vec3<T>(const Vec3<T>&)>&,         \
                                            const Vec3<T>&, std::array<double, 2>,                 \
                                            const IntegratorOptions&);

SLGEO_INST(double)
SLGEO_INST(long double)
SLGEO_INST(cplx)

} // namespace slgeo

#include "slgeo/verify.hpp"
#include "slgeo/charts.hpp"
#include "slgeo/completeness.hpp"
#include "slgeo/sampling.hpp"
#include "slgeo/scan.hpp"

#include <cmath>

namespace slgeo {

namespace {

constexpr std::array<Case, 4> all_cases{Case::One, Case::Two, Case::Three, Case::Four};

// err(i, rng) returns the residual of item i; NaN and exceptions count as failures
template <class Fn>
SuiteResult run_suite(const std::string& name, long n, double bound, const VerifyOptions& opt, std::uint64_t stream, Fn err)
{
    SuiteResult r{name, 0, n, 0, bound};
    long passed = 0;
    double worst = 0;
#pragma omp parallel for schedule(dynamic) if (opt.parallel) reduction(+ : passed) reduction(max : worst)
    for (long i = 0; i < n; ++i) {
        Rng rng(derive_seed(opt.seed, stream, std::uint64_t(i)));
        double e;
        try {
            e = err(i, rng);
        } catch (const Error&) {
            e = std::numeric_limits<double>::infinity();
        }
        if (!(e <= bound))
            e = std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
        else
            ++passed;
        worst = std::max(worst, e);
    }
    r.passed = passed;
    r.worst = worst;
    return r;
}

Mat3<double> verify_gram(const VerifyOptions& opt)
{
    Mat3<double> G = killing_gram();
    if (opt.perturb_gram)
        G(0, 1) = G(1, 0) = 1e-3;
    return G;
}

Vec3<double> scaled_vec(Rng& rng, double s) { return s * Vec3<double>(rng.normal(), rng.normal(), rng.normal()); }

EAField<double> random_field(Case k, Rng& rng) { return build_field(reduce<double>(random_phi(k, rng).phi)); }

} // namespace

Vec3<double> start_inside_domain(const EAField<double>& f, Vec3<double> z0, double T, const IntegratorOptions& opts)
{
    IntegratorOptions o = opts;
    o.keep_samples = false;
    for (int k = 0; k < 60; ++k) {
        const auto tr = integrate(f, z0, {0, T}, o);
        if (tr.termination == Termination::SpanCompleted)
            return z0;
        // z(t) = s z_1(s t): halving the start doubles the blow-up time
        const double tb = std::abs(tr.termination == Termination::BlowUp ? tr.t_est : tr.t_end);
        z0 *= std::clamp(tb / (2 * T), 1e-3, 0.5);
    }
    throw Error("start_inside_domain: no start with a solution on [0, T]");
}

SuiteResult drift_suite(const VerifyOptions& opt)
{
    const long per = opt.drift_starts;
    return run_suite("first-integral drift", 4 * per, opt.drift_bound, opt, 11, [&](long i, Rng& rng) {
        const auto f = random_field(all_cases[i / per], rng);
        const Vec3<double> z0 = start_inside_domain(f, rng.unit3(), opt.drift_span);
        IntegratorOptions o;
        o.keep_samples = false;
        const auto tr = integrate(f, z0, {0, opt.drift_span}, o);
        return tr.termination == Termination::SpanCompleted ? tr.integral_drift : std::numeric_limits<double>::infinity();
    });
}

std::vector<SuiteResult> run_verify(const VerifyOptions& opt)
{
    const long n = opt.samples;
    const Mat3<double> G = verify_gram(opt);
    auto B = [&](const Vec3<double>& x, const Vec3<double>& y) { return x.dot(G * y); };
    std::vector<SuiteResult> out;

    out.push_back(run_suite("Jacobi identity", n, 1e-12, opt, 1, [&](long, Rng& rng) {
        const double s = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        const Vec3<double> x = scaled_vec(rng, s), y = scaled_vec(rng, s), z = scaled_vec(rng, s);
        const Vec3<double> j = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) + bracket(z, bracket(x, y));
        return j.norm() / (s * s * s);
    }));

    out.push_back(run_suite("ad-invariance of the Killing form", n, 1e-12, opt, 2, [&](long, Rng& rng) {
        const double s = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        const Vec3<double> x = scaled_vec(rng, s), y = scaled_vec(rng, s), z = scaled_vec(rng, s);
        return std::abs(B(bracket(x, y), z) + B(y, bracket(x, z))) / (s * s * s);
    }));

    out.push_back(run_suite("Killing trace normalization", n, 1e-12, opt, 3, [&](long, Rng& rng) {
        const double s = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        const Vec3<double> x = scaled_vec(rng, s), y = scaled_vec(rng, s);
        return std::max(std::abs(B(x, y) - killing_ad(x, y)), std::abs(killing_trace(x, y) - killing_ad(x, y))) / (s * s);
    }));

    out.push_back(run_suite("normal form reconstruction", n, 1e-8, opt, 4, [&](long i, Rng& rng) {
        const Case k = all_cases[i % 4];
        const auto s = random_phi(k, rng);
        const auto nf = reduce<double>(s.phi);
        if (nf.kind != k)
            return std::numeric_limits<double>::infinity();
        const double recon = (nf.P * template_matrix(nf) * nf.P.inverse() - s.phi).cwiseAbs().maxCoeff();
        const double gr = (gram<double>(nf.P) - adapted_gram(nf.kind)).cwiseAbs().maxCoeff();
        return std::max(recon, gr);
    }));

    out.push_back(run_suite("inverse parameters", n, 1e-12, opt, 5, [&](long i, Rng& rng) {
        const auto nf = reduce<double>(random_phi(all_cases[i % 4], rng).phi);
        const Mat3<double> num = template_matrix(nf).inverse();
        const Mat3<double> ana = inverse_template<double>(nf.kind, invert_params(nf));
        return (num - ana).cwiseAbs().maxCoeff() / std::max(1.0, num.cwiseAbs().maxCoeff());
    }));

    out.push_back(run_suite("first integrals annihilated by the field", n, 1e-12, opt, 6, [&](long i, Rng& rng) {
        const auto f = random_field(all_cases[i % 4], rng);
        const Vec3<double> z = rng.unit3() * rng.uniform(0.1, 3.0);
        const auto g = integral_gradients(f, z);
        const double scale = std::max(1.0, f(z).norm() * g.norm());
        return std::max(std::abs(g.row(0).dot(f(z))), std::abs(g.row(1).dot(f(z)))) / scale;
    }));

    out.push_back(run_suite("Lax form conjugation", n, 1e-8, opt, 7, [&](long i, Rng& rng) {
        const auto s = random_phi(all_cases[i % 4], rng);
        const auto nf = reduce<double>(s.phi);
        const auto f = build_field(nf);
        const Vec3<double> z = rng.unit3();
        const Vec3<double> lhs = nf.P.inverse() * lax_rhs<double>(s.phi, nf.P * z);
        return (lhs - f(z)).norm() / std::max(1.0, f(z).norm());
    }));

    out.push_back(drift_suite(opt));

    out.push_back(run_suite("idempotent residual and nullity", n, 1e-10, opt, 8, [&](long i, Rng& rng) {
        const auto f = random_field(all_cases[i % 4], rng);
        double e = 0;
        for (const auto& r : find_idempotents(f)) {
            e = std::max(e, (f(r.direction) - r.kappa_unit * r.direction).norm() / std::max(1.0, std::abs(r.kappa_unit)));
            if (causal_type(f, r.direction) != CausalType::Null)
                e = std::numeric_limits<double>::infinity();
        }
        return e;
    }));

    out.push_back(run_suite("chart transitions", n, 1e-12, opt, 9, [&](long, Rng& rng) {
        const Vec3<double> z(rng.signed_mag(0.2, 2), rng.signed_mag(0.2, 2), rng.signed_mag(0.2, 2));
        double e = 0;
        for (ChartId a : {ChartId::Affine, ChartId::X, ChartId::Y, ChartId::U, ChartId::W}) {
            const Vec3<double> p = to_chart<double>(z, ChartId::Affine, a);
            e = std::max(e, (to_chart<double>(p, a, ChartId::Affine) - z).norm() / z.norm());
        }
        return e;
    }));

    out.push_back(run_suite("singular points at infinity", n, 1e-10, opt, 10, [&](long i, Rng& rng) {
        const auto f = random_field(all_cases[i % 4], rng);
        double e = 0;
        for (const auto& p : infinity_singularities(f)) {
            const ChartField<double> g{p.chart, f};
            e = std::max(e, g.at_infinity(p.coords).norm() / std::max(1.0, p.coords.squaredNorm() * 10));
        }
        return e;
    }));

    out.push_back(run_suite("complete metric recipe", 4, 0, opt, 12, [&](long i, Rng&) {
        const auto m = build_complete_metric(int(i) - 2);
        const auto nf = reduce<double>(Mat3<double>(Vec3<double>(1 / m.nu[0], 1 / m.nu[1], 1 / m.nu[2]).asDiagonal()));
        const bool ok = metric_verdict(nf).complete && m.J[0] > 0 && m.J[1] > 0 && m.J[2] > 0;
        return ok ? 0.0 : 1.0;
    }));

    return out;
}

} // namespace slgeo

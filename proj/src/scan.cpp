#include "slgeo/scan.hpp"
#include "slgeo/io.hpp"
#include "slgeo/sampling.hpp"

#include <algorithm>
#include <ostream>

namespace slgeo {

namespace {

std::string csv_safe(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    // splitmix64 finalizer over a combined key
    std::uint64_t x = seed ^ (stream * 0x9E3779B97F4A7C15ULL) ^ (index * 0xD1B54A32D192ED03ULL);
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CrossCheck cross_check(const NormalForm<double>& nf, std::uint64_t seed, const CrossCheckOptions& opt)
{
    CrossCheck out;
    const auto f = build_field(nf);
    out.analytic_complete = metric_verdict(nf).complete;
    if (out.analytic_complete) {
        // case 3 complete solutions grow like exp(lambda t) and leave double range before t = 100
        const auto fl = field_cast<long double>(f);
        Rng rng(seed);
        for (int i = 0; i < opt.starts && out.numeric_complete; ++i) {
            const Vec3<long double> z0 = rng.unit3().cast<long double>();
            for (double dir : {1.0, -1.0}) {
                const auto tr = integrate(fl, z0, {0, dir * opt.horizon}, opt.integ);
                if (tr.termination != Termination::SpanCompleted) {
                    out.numeric_complete = false;
                    out.t_est = tr.t_est;
                    out.note = to_string(tr.termination) + " from a random start";
                    break;
                }
            }
        }
    } else {
        const auto rays = find_idempotents(f);
        if (rays.empty()) {
            out.note = "no idempotent to test";
        } else {
            const auto& r = rays.front();
            out.t_star = blowup_time(r, 1.0);
            const auto tr = integrate(f, r.section, {0, opt.pole_factor * out.t_star}, opt.integ);
            out.numeric_complete = tr.termination != Termination::BlowUp;
            out.t_est = tr.t_est;
            out.note = to_string(tr.termination) + " on the idempotent section";
        }
    }
    out.agree = out.analytic_complete == out.numeric_complete;
    return out;
}

std::vector<SampleCheck> cross_validate(Case kind, int n, std::uint64_t seed, const CrossCheckOptions& opt, bool parallel)
{
    std::vector<SampleCheck> out(std::max(n, 0));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, std::uint64_t(kind), std::uint64_t(i)));
        out[i].phi = random_phi(kind, rng).phi;
        try {
            out[i].check = cross_check(reduce<double>(out[i].phi), rng.gen(), opt);
        } catch (const Error& e) {
            out[i].check.agree = false;
            out[i].check.note = e.what();
        }
    }
    return out;
}

namespace {

double grid(const std::array<double, 2>& r, int count, int i) { return count == 1 ? r[0] : r[0] + (r[1] - r[0]) * i / (count - 1); }

Mat3<double> scan_phi(const ScanSpec& spec, const std::array<double, 3>& q)
{
    for (int i = 0; i < (spec.kind == Case::One ? 3 : 2); ++i)
        if (q[i] == 0)
            throw Error("zero inverse eigenvalue");
    if (spec.kind == Case::One)
        return Vec3<double>(1 / q[0], 1 / q[1], 1 / q[2]).asDiagonal();
    if (q[2] == 0)
        throw Error("zeta = 0");
    CaseParams<double> p;
    p.mu = 1 / q[0];
    p.lam = 1 / q[1];
    p.zeta = q[2];
    return phi_from_template(Case::Three, p, pseudo_frame()).phi;
}

} // namespace

std::vector<ScanRow> scan(const ScanSpec& spec, bool parallel)
{
    if (spec.kind != Case::One && spec.kind != Case::Three)
        throw InputError("scan: only cases 1 and 3 have a parameter grid");
    if (spec.count < 1)
        throw InputError("scan: count must be positive");
    const long n = spec.count;
    const long total = n * n * n;
    std::vector<ScanRow> rows(total);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long k = 0; k < total; ++k) {
        ScanRow& row = rows[k];
        const int i = int(k / (n * n)), j = int((k / n) % n), l = int(k % n);
        row.params = {grid(spec.range, spec.count, i), grid(spec.range, spec.count, j),
                      grid(spec.kind == Case::One ? spec.range : spec.zeta_range, spec.count, l)};
        try {
            const auto nf = reduce<double>(scan_phi(spec, row.params));
            const auto f = build_field(nf);
            row.a = f.a;
            row.b = f.b;
            if (spec.numeric) {
                const auto c = cross_check(nf, derive_seed(spec.seed, 0, std::uint64_t(k)), spec.check);
                row.analytic_complete = c.analytic_complete;
                row.numeric_complete = c.numeric_complete;
                row.flagged = !c.agree;
                if (!c.agree)
                    row.note = c.note;
            } else {
                row.analytic_complete = metric_verdict(nf).complete;
            }
        } catch (const Error& e) {
            row.flagged = true;
            row.note = e.what();
        }
    }
    return rows;
}

void write_scan_csv(std::ostream& out, const ScanSpec& spec, const std::vector<ScanRow>& rows)
{
    out << "# case=" << int(spec.kind) << ",count=" << spec.count << ",numeric=" << (spec.numeric ? 1 : 0)
        << ",seed=" << spec.seed << "\n";
    out << (spec.kind == Case::One ? "nu1,nu2,nu3" : "eta,nu,zeta") << ",a,b,analytic,numeric,flagged,note\n";
    long flagged = 0;
    for (const auto& r : rows) {
        out << fmt17(r.params[0]) << ',' << fmt17(r.params[1]) << ',' << fmt17(r.params[2]) << ',' << fmt17(r.a) << ','
            << fmt17(r.b) << ',' << (r.analytic_complete ? "complete" : "incomplete") << ','
            << (r.numeric_complete ? (*r.numeric_complete ? "complete" : "incomplete") : "") << ','
            << (r.flagged ? 1 : 0) << ',' << csv_safe(r.note) << '\n';
        flagged += r.flagged;
    }
    out << "# rows=" << rows.size() << ",flagged=" << flagged << "\n";
}

} // namespace slgeo

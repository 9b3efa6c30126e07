#include "slgeo/io.hpp"
#include "slgeo/scan.hpp"
#include "slgeo/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

using namespace slgeo;

namespace {

constexpr int exit_ok = 0, exit_verify = 1, exit_input = 2;

struct Args {
    std::string input, z0, tspan = "0,10", ray, loop, out;
    double tol = 0;
    std::uint64_t seed = 1;
    // scan
    int scan_case = 1, count = 21, starts = 2;
    std::string range = "0.1,3", zeta_range = "-2,2";
    bool numeric = false, serial = false;
    // portrait
    int leaves = 12, points = 400;
    double window = 5;
    // verify
    bool fault_gram = false;
    double drift_bound = 1e-8;
    int samples = 1000;
};

// stdout unless --out is given
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw InputError("cannot write " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

PhiInput need_input(const Args& a)
{
    if (a.input.empty())
        throw InputError("--input is required");
    return load_phi(a.input);
}

NormalForm<double> real_form(const Args& a, const char* cmd)
{
    const auto in = need_input(a);
    if (in.mode != Field::Real)
        throw InputError(std::string(cmd) + " needs a real map");
    return reduce<double>(in.real);
}

IntegratorOptions integ_options(const Args& a)
{
    IntegratorOptions o;
    if (a.tol > 0)
        o.rel_tol = o.abs_tol = a.tol;
    validate(o);
    return o;
}

void emit(const Args& a, const nlohmann::json& j)
{
    Output out(a.out);
    out.os() << j.dump(2) << '\n';
}

int cmd_classify(const Args& a)
{
    const auto in = need_input(a);
    emit(a, in.mode == Field::Real ? classify_report(reduce<double>(in.real)) : classify_report(reduce<cplx>(in.complex)));
    return exit_ok;
}

int cmd_integrate(const Args& a)
{
    const auto in = need_input(a);
    if (a.z0.empty())
        throw InputError("--z0 is required");
    const auto opts = integ_options(a);
    if (in.mode == Field::Real) {
        if (!a.ray.empty() || !a.loop.empty())
            throw InputError("--ray and --loop need a complex map");
        const auto nf = reduce<double>(in.real);
        const auto span = parse_list(a.tspan, 2, "--tspan");
        const Vec3<double> z = nf.P.lu().solve(parse_vec3(a.z0));
        const auto tr = integrate(build_field(nf), z, {span[0], span[1]}, opts);
        Output out(a.out);
        write_trajectory_csv(out.os(), tr, nf.P);
        return exit_ok;
    }
    const auto nf = reduce<cplx>(in.complex);
    const auto f = build_field(nf);
    const Vec3<cplx> z = nf.P.lu().solve(parse_cvec3(a.z0));
    if (!a.loop.empty()) {
        const double dev = monodromy_loop(f, z, load_loop(a.loop), opts);
        emit(a, {{"deviation", dev}});
        return exit_ok;
    }
    Trajectory<cplx> tr;
    if (!a.ray.empty()) {
        const auto r = parse_list(a.ray, 2, "--ray");
        tr = integrate_complex_ray(f, z, RayPath{r[0], r[1]}, opts);
    } else {
        const auto span = parse_list(a.tspan, 2, "--tspan");
        tr = integrate_complex_segment(f, z, span[0], span[1], opts);
    }
    Output out(a.out);
    write_trajectory_csv(out.os(), tr, nf.P);
    return exit_ok;
}

int cmd_verdict(const Args& a)
{
    const auto nf = real_form(a, "verdict");
    if (a.z0.empty())
        throw InputError("--z0 is required");
    emit(a, verdict_report(nf, parse_vec3(a.z0), a.tol > 0 ? a.tol : 1e-9));
    return exit_ok;
}

int cmd_idempotents(const Args& a)
{
    const auto in = need_input(a);
    emit(a, in.mode == Field::Real ? idempotents_report(reduce<double>(in.real))
                                   : idempotents_report(reduce<cplx>(in.complex)));
    return exit_ok;
}

int cmd_portrait(const Args& a)
{
    const auto nf = real_form(a, "portrait");
    Output out(a.out);
    write_portrait_csv(out.os(), build_field(nf), PortraitOptions{a.leaves, a.points, a.window, a.seed});
    return exit_ok;
}

int cmd_scan(const Args& a)
{
    ScanSpec spec;
    if (a.scan_case != 1 && a.scan_case != 3)
        throw InputError("--case must be 1 or 3");
    spec.kind = Case(a.scan_case);
    const auto r = parse_list(a.range, 2, "--range"), zr = parse_list(a.zeta_range, 2, "--zeta-range");
    spec.range = {r[0], r[1]};
    spec.zeta_range = {zr[0], zr[1]};
    spec.count = a.count;
    spec.numeric = a.numeric;
    spec.seed = a.seed;
    spec.check.starts = a.starts;
    spec.check.integ = integ_options(a);
    spec.check.integ.keep_samples = false;
    const auto rows = scan(spec, !a.serial);
    Output out(a.out);
    write_scan_csv(out.os(), spec, rows);
    return exit_ok;
}

int cmd_verify(const Args& a)
{
    VerifyOptions o;
    o.seed = a.seed;
    o.perturb_gram = a.fault_gram;
    o.drift_bound = a.drift_bound;
    o.samples = a.samples;
    o.parallel = !a.serial;
    const auto res = run_verify(o);
    Output out(a.out);
    bool ok = true;
    out.os() << "# seed=" << o.seed << "\n";
    for (const auto& r : res) {
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-42s %6ld/%-6ld worst %.3g (bound %.3g)\n", r.ok() ? "ok" : "FAIL",
                      r.name.c_str(), r.passed, r.total, r.worst, r.bound);
        out.os() << line;
        ok = ok && r.ok();
    }
    out.os() << (ok ? "all suites passed\n" : "verification failed\n");
    return ok ? exit_ok : exit_verify;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Completeness of left-invariant metrics on SL(2) and their Euler-Arnold flows"};
    app.require_subcommand(1);
    Args a;

    auto input = [&](CLI::App* c) { c->add_option("--input", a.input, "map file")->check(CLI::ExistingFile); };
    auto out = [&](CLI::App* c) { c->add_option("--out", a.out, "output file (default stdout)"); };
    auto tol = [&](CLI::App* c, const char* what) { c->add_option("--tol", a.tol, what)->check(CLI::PositiveNumber); };

    auto* classify = app.add_subcommand("classify", "normal form and metric completeness");
    input(classify);
    out(classify);

    auto* integ = app.add_subcommand("integrate", "trajectory as CSV, or loop monodromy as JSON");
    input(integ);
    out(integ);
    tol(integ, "integrator tolerance (relative and absolute)");
    integ->add_option("--z0", a.z0, "start in the standard basis; complex entries re:im");
    integ->add_option("--tspan", a.tspan, "t0,t1");
    integ->add_option("--ray", a.ray, "theta,rmax (complex maps)");
    integ->add_option("--loop", a.loop, "file of closed complex-time polygon (complex maps)")->check(CLI::ExistingFile);

    auto* verdict = app.add_subcommand("verdict", "maximal interval class of one geodesic");
    input(verdict);
    out(verdict);
    tol(verdict, "membership tolerance for invariant sets");
    verdict->add_option("--z0", a.z0, "start in the standard basis");

    auto* idem = app.add_subcommand("idempotents", "idempotent rays and growth constants");
    input(idem);
    out(idem);

    auto* portrait = app.add_subcommand("portrait", "singular points and leaves at infinity as CSV");
    input(portrait);
    out(portrait);
    portrait->add_option("--seed", a.seed, "seed for leaf directions");
    portrait->add_option("--leaves", a.leaves, "number of sampled leaves")->check(CLI::NonNegativeNumber);
    portrait->add_option("--points", a.points, "points per leaf")->check(CLI::Range(2, 1000000));
    portrait->add_option("--window", a.window, "drop points with |x_i| above this")->check(CLI::PositiveNumber);

    auto* sc = app.add_subcommand("scan", "verdict over a parameter grid");
    out(sc);
    tol(sc, "integrator tolerance for --numeric");
    sc->add_option("--case", a.scan_case, "1 (nu grid) or 3 (eta, nu, zeta grid)");
    sc->add_option("--range", a.range, "lo,hi for nu_i or eta, nu");
    sc->add_option("--zeta-range", a.zeta_range, "lo,hi for zeta (case 3)");
    sc->add_option("--count", a.count, "points per axis")->check(CLI::PositiveNumber);
    sc->add_flag("--numeric", a.numeric, "cross-check each point by integration");
    sc->add_option("--starts", a.starts, "random starts per complete point")->check(CLI::NonNegativeNumber);
    sc->add_option("--seed", a.seed, "seed for random starts");
    sc->add_flag("--serial", a.serial, "run on one thread");

    auto* ver = app.add_subcommand("verify", "run the invariant suites");
    out(ver);
    ver->add_option("--seed", a.seed, "sample seed");
    ver->add_option("--samples", a.samples, "samples per suite")->check(CLI::PositiveNumber);
    ver->add_flag("--fault-gram", a.fault_gram, "perturb the Killing Gram matrix");
    ver->add_option("--drift-bound", a.drift_bound, "first-integral drift bound")->check(CLI::PositiveNumber);
    ver->add_flag("--serial", a.serial, "run on one thread");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*classify)
            return cmd_classify(a);
        if (*integ)
            return cmd_integrate(a);
        if (*verdict)
            return cmd_verdict(a);
        if (*idem)
            return cmd_idempotents(a);
        if (*portrait)
            return cmd_portrait(a);
        if (*sc)
            return cmd_scan(a);
        if (*ver)
            return cmd_verify(a);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}

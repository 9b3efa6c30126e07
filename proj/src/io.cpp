#include "slgeo/io.hpp"
#include "slgeo/sampling.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace slgeo {

using nlohmann::json;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& what)
{
    const std::string s = trim(raw);
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const double d = parse_number(s.substr(slash + 1), what);
        if (d == 0)
            throw InputError(what + ": division by zero in '" + s + "'");
        return parse_number(s.substr(0, slash), what) / d;
    }
    double v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw InputError(what + ": cannot parse number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

cplx parse_complex(const std::string& s, char sep, const std::string& what)
{
    const auto parts = split(s, sep);
    if (parts.size() == 1)
        return {parse_number(parts[0], what), 0.0};
    if (parts.size() == 2)
        return {parse_number(parts[0], what), parse_number(parts[1], what)};
    throw InputError(what + ": cannot parse complex number '" + s + "'");
}

json mat_json(const Mat3<double>& m)
{
    json rows = json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

json mat_json(const Mat3<cplx>& m)
{
    json rows = json::array();
    for (int i = 0; i < 3; ++i)
        rows.push_back({to_json(m(i, 0)), to_json(m(i, 1)), to_json(m(i, 2))});
    return rows;
}

json vec_json(const Vec3<double>& v) { return {v(0), v(1), v(2)}; }
json vec_json(const Vec3<cplx>& v) { return {to_json(v(0)), to_json(v(1)), to_json(v(2))}; }

json num(double x) { return std::isfinite(x) ? json(x) : json(x > 0 ? "inf" : x < 0 ? "-inf" : "nan"); }
json num(cplx x) { return to_json(x); }

template <class T> json params_json(const NormalForm<T>& nf)
{
    const auto& p = nf.params;
    switch (nf.kind) {
    case Case::One:
        return {{"lambda", {num(p.lambda[0]), num(p.lambda[1]), num(p.lambda[2])}}};
    case Case::Two:
        return {{"mu", num(p.mu)}, {"alpha", num(p.alpha)}, {"beta", num(p.beta)}};
    case Case::Three:
        return {{"mu", num(p.mu)}, {"lambda", num(p.lam)}, {"zeta", num(p.zeta)}};
    case Case::Four:
        return {{"lambda", num(p.lam)}, {"zeta", num(p.zeta)}};
    }
    return {};
}

template <class T> json inverse_json(Case kind, const InverseParams<T>& q)
{
    switch (kind) {
    case Case::One:
        return {{"nu", {num(q.nu3[0]), num(q.nu3[1]), num(q.nu3[2])}}};
    case Case::Two:
        return {{"eta", num(q.eta)}, {"gamma", num(q.gamma)}, {"zeta", num(q.zeta)}};
    case Case::Three:
        return {{"eta", num(q.eta)}, {"nu", num(q.nu)}, {"zeta", num(q.zeta)}};
    case Case::Four:
        return {{"nu", num(q.nu)}, {"zeta", num(q.zeta)}};
    }
    return {};
}

template <class T> json field_json(const EAField<T>& f)
{
    json j{{"zero", f.is_zero()}, {"delta", f.delta}};
    switch (f.kind) {
    case Case::One:
        j["a"] = num(f.a);
        j["b"] = num(f.b);
        j["c"] = num(f.c);
        break;
    case Case::Two:
    case Case::Three:
        j["a"] = num(f.a);
        j["b"] = num(f.b);
        break;
    case Case::Four:
        j["zeta"] = num(f.zeta);
        j["nu"] = num(f.nu);
        break;
    }
    return j;
}

template <class T> json classify_impl(const NormalForm<T>& nf, const char* mode)
{
    const auto f = build_field(nf);
    const auto v = metric_verdict(nf);
    json spec = json::array();
    for (const auto& e : nf.spectrum.eigenvalues)
        spec.push_back({{"value", to_json(e.value)}, {"alg_mult", e.alg_mult}, {"geo_mult", e.geo_mult}});
    return {
        {"mode", mode},
        {"case", int(nf.kind)},
        {"params", params_json(nf)},
        {"inverse_params", inverse_json(nf.kind, f.inv)},
        {"basis", {{"kind", to_string(nf.basis.kind)}, {"delta", nf.basis.delta}}},
        {"P", mat_json(nf.P)},
        {"spectrum", spec},
        {"field", field_json(f)},
        {"complete", v.complete},
        {"criterion", v.criterion_value ? json(*v.criterion_value) : json(nullptr)},
        {"criterion_id", v.criterion_id},
    };
}

template <class T> json idempotents_impl(const NormalForm<T>& nf)
{
    const auto f = build_field(nf);
    json list = json::array();
    for (const auto& r : find_idempotents(f)) {
        json j{
            {"section", vec_json(r.section)},
            {"direction", vec_json(r.direction)},
            {"direction_standard", vec_json(Vec3<T>(nf.P * r.direction))},
            {"kappa", num(r.kappa)},
            {"kappa_unit", num(r.kappa_unit)},
            {"residual", r.residual},
        };
        if constexpr (!is_complex_v<T>)
            j["causal_type"] = to_string(causal_type(f, r.direction));
        list.push_back(j);
    }
    return {{"case", int(nf.kind)}, {"idempotents", list}};
}

std::string footer(const auto& tr)
{
    std::ostringstream s;
    s << "# termination=" << to_string(tr.termination);
    if constexpr (std::is_same_v<std::decay_t<decltype(tr.t_end)>, double>)
        s << ",t_end=" << fmt17(tr.t_end) << ",t_est=" << fmt17(tr.t_est);
    else
        s << ",t_end=" << fmt17(tr.t_end.real()) << ":" << fmt17(tr.t_end.imag()) << ",t_est=" << fmt17(tr.t_est.real())
          << ":" << fmt17(tr.t_est.imag());
    s << ",drift_I1=" << fmt17(tr.drift_I1) << ",drift_I2=" << fmt17(tr.drift_I2) << ",drift=" << fmt17(tr.integral_drift)
      << ",steps=" << tr.steps << "\n";
    return s.str();
}

} // namespace

PhiInput parse_phi(std::istream& in)
{
    PhiInput out;
    bool have_mode = false, have_phi = false;
    std::vector<std::string> entries;
    bool reading_phi = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            if (reading_phi)
                throw InputError("line " + std::to_string(lineno) + ": phi needs 9 entries before the next key");
            const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (key == "mode") {
                if (value == "real")
                    out.mode = Field::Real;
                else if (value == "complex")
                    out.mode = Field::Complex;
                else
                    throw InputError("line " + std::to_string(lineno) + ": mode must be real or complex");
                have_mode = true;
            } else if (key == "basis") {
                if (value != "standard")
                    throw InputError("line " + std::to_string(lineno) + ": only the standard basis is supported");
            } else if (key == "phi") {
                if (have_phi)
                    throw InputError("line " + std::to_string(lineno) + ": phi given twice");
                have_phi = reading_phi = true;
                line = value;
            } else {
                throw InputError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        }
        if (!reading_phi || line.empty())
            continue;
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok)
            entries.push_back(tok);
        if (entries.size() > 9)
            throw InputError("line " + std::to_string(lineno) + ": phi has more than 9 entries");
        if (entries.size() == 9)
            reading_phi = false;
    }
    if (!have_phi)
        throw InputError("missing phi");
    if (entries.size() != 9)
        throw InputError("phi needs 9 entries, got " + std::to_string(entries.size()));
    if (!have_mode)
        out.mode = Field::Real;
    for (int k = 0; k < 9; ++k) {
        const std::string what = "phi(" + std::to_string(k / 3 + 1) + "," + std::to_string(k % 3 + 1) + ")";
        if (out.mode == Field::Real) {
            if (entries[k].find(',') != std::string::npos)
                throw InputError(what + ": complex entry in real mode");
            out.real(k / 3, k % 3) = parse_number(entries[k], what);
        } else {
            out.complex(k / 3, k % 3) = parse_complex(entries[k], ',', what);
        }
    }
    if (out.mode == Field::Real) {
        const double s = std::max(1.0, out.real.cwiseAbs().maxCoeff());
        if (!check_self_adjoint(out.real, 1e-9 * s))
            throw InputError("phi is not a B-self-adjoint isomorphism");
    } else {
        const double s = std::max(1.0, out.complex.cwiseAbs().maxCoeff());
        if (!check_self_adjoint(out.complex, 1e-9 * s))
            throw InputError("phi is not a B-self-adjoint isomorphism");
    }
    return out;
}

PhiInput load_phi(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return parse_phi(in);
}

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& what)
{
    const auto parts = split(text, ',');
    if (parts.size() != n)
        throw InputError(what + ": expected " + std::to_string(n) + " comma-separated numbers");
    std::vector<double> out;
    for (const auto& p : parts)
        out.push_back(parse_number(p, what));
    return out;
}

Vec3<double> parse_vec3(const std::string& text)
{
    const auto v = parse_list(text, 3, "--z0");
    return {v[0], v[1], v[2]};
}

Vec3<cplx> parse_cvec3(const std::string& text)
{
    const auto parts = split(text, ',');
    if (parts.size() != 3)
        throw InputError("--z0: expected 3 comma-separated entries");
    Vec3<cplx> z;
    for (int i = 0; i < 3; ++i)
        z(i) = parse_complex(parts[i], ':', "--z0");
    return z;
}

LoopPath load_loop(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    LoopPath loop;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (!line.empty())
            loop.vertices.push_back(parse_complex(line, ',', "loop vertex"));
    }
    if (loop.vertices.size() < 2 || loop.vertices.front() != loop.vertices.back())
        throw InputError("loop must list at least two vertices and end where it starts");
    return loop;
}

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(cplx x) { return {x.real(), x.imag()}; }

json classify_report(const NormalForm<double>& nf) { return classify_impl(nf, "real"); }
json classify_report(const NormalForm<cplx>& nf) { return classify_impl(nf, "complex"); }

json verdict_report(const NormalForm<double>& nf, const Vec3<double>& z0, double tol)
{
    const auto f = build_field(nf);
    const Vec3<double> z = nf.P.lu().solve(z0);
    const auto v = geodesic_verdict(f, z, tol);
    const auto I = first_integrals(f, z);
    json j{
        {"case", int(nf.kind)},
        {"z0", vec_json(z0)},
        {"z0_adapted", vec_json(z)},
        {"class", to_string(v.cls)},
        {"complete_side", v.cls == GeodesicClass::HalfComplete ? json(to_string(v.complete_side)) : json(nullptr)},
        {"endpoints", v.endpoints ? json{num((*v.endpoints)[0]), num((*v.endpoints)[1])} : json(nullptr)},
        {"extrapolated", v.extrapolated},
        {"rule", v.rule},
        {"causal_type", to_string(causal_type(f, z))},
        {"I1", I.I1},
        {"I2", I.I2},
    };
    return j;
}

json idempotents_report(const NormalForm<double>& nf) { return idempotents_impl(nf); }
json idempotents_report(const NormalForm<cplx>& nf) { return idempotents_impl(nf); }

void write_trajectory_csv(std::ostream& out, const Trajectory<double>& tr, const Mat3<double>& P)
{
    out << "t,z1,z2,z3\n";
    for (const auto& s : tr.samples) {
        const Vec3<double> z = P * s.z;
        out << fmt17(s.t) << ',' << fmt17(z(0)) << ',' << fmt17(z(1)) << ',' << fmt17(z(2)) << '\n';
    }
    out << footer(tr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory<cplx>& tr, const Mat3<cplx>& P)
{
    out << "t_re,t_im,z1_re,z1_im,z2_re,z2_im,z3_re,z3_im\n";
    for (const auto& s : tr.samples) {
        const Vec3<cplx> z = P * s.z;
        out << fmt17(s.t.real()) << ',' << fmt17(s.t.imag());
        for (int i = 0; i < 3; ++i)
            out << ',' << fmt17(z(i).real()) << ',' << fmt17(z(i).imag());
        out << '\n';
    }
    out << footer(tr);
}

void write_portrait_csv(std::ostream& out, const EAField<double>& f, const PortraitOptions& opt)
{
    if (opt.leaves < 0 || opt.points < 2 || !(opt.window > 0))
        throw InputError("portrait: need leaves >= 0, points >= 2 and window > 0");
    out << "# seed=" << opt.seed << "\n";
    out << "record,chart,x1,x2,label\n";
    for (const auto& s : infinity_singularities(f))
        out << "singularity," << to_string(s.chart) << ',' << fmt17(s.coords(0)) << ',' << fmt17(s.coords(1)) << ','
            << to_string(s.kind) << '\n';
    if (f.is_zero())
        return;
    Rng rng(opt.seed);
    for (int k = 0; k < opt.leaves; ++k) {
        Vec3<double> d = rng.unit3();
        if (std::abs(d(2)) < 1e-3)
            d(2) = 1e-3;
        const auto leaf = leaf_at_infinity(f, d);
        if (!leaf.in_chart || leaf.shape == LeafAtInfinity::Shape::None)
            continue;
        const double lo = std::max(leaf.param_bounds[0], leaf.sigma0 - 50.0);
        const double hi = std::min(leaf.param_bounds[1], leaf.sigma0 + 50.0);
        for (int i = 0; i < opt.points; ++i) {
            const Vec2<double> p = leaf.point(lo + (hi - lo) * i / (opt.points - 1));
            if (p.allFinite() && p.cwiseAbs().maxCoeff() <= opt.window)
                out << "leaf,X," << fmt17(p(0)) << ',' << fmt17(p(1)) << ',' << k << '\n';
        }
    }
}

} // namespace slgeo

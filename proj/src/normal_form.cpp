#include "slgeo/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slgeo {

namespace {

template <class T> T from_cplx(cplx v)
{
    if constexpr (is_complex_v<T>)
        return v;
    else
        return v.real();
}

template <class T> double scale_of(const Mat3<T>& m) { return std::max(1e-300, m.norm()); }

cplx cbrt_c(cplx z)
{
    if (z == cplx(0))
        return 0;
    return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

struct CubicRoots {
    std::array<cplx, 3> r;
    int snapped = 0; // 0 none, 2 double root at r[0]=r[1], 3 triple
};

template <class T> CubicRoots cubic_roots(const Mat3<T>& m, double s)
{
    const T tr = m.trace();
    const T c2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                 m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const T det = m.determinant();
    const cplx A = -cplx(tr), B = cplx(c2), C = -cplx(det);
    const cplx shift = -A / 3.0;
    const cplx p = B - A * A / 3.0;
    const cplx q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;

    CubicRoots out;
    if (std::abs(p) <= 1e-10 * s * s && std::abs(q) <= 1e-10 * s * s * s) {
        out.r = {shift, shift, shift};
        out.snapped = 3;
        return out;
    }
    const cplx D = 4.0 * p * p * p + 27.0 * q * q;
    if (std::abs(D) <= 1e-9 * (4.0 * std::abs(p * p * p) + 27.0 * std::abs(q * q))) {
        cplx yd = -3.0 * q / (2.0 * p), ys = 3.0 * q / p;
        if constexpr (!is_complex_v<T>) {
            yd = yd.real();
            ys = ys.real();
        }
        out.r = {yd + shift, yd + shift, ys + shift};
        out.snapped = 2;
        return out;
    }

    if constexpr (!is_complex_v<T>) {
        const double pr = p.real(), qr = q.real();
        if (D.real() < 0) {
            const double rr = 2.0 * std::sqrt(-pr / 3.0);
            double arg = 3.0 * qr / (2.0 * pr) * std::sqrt(-3.0 / pr);
            arg = std::clamp(arg, -1.0, 1.0);
            const double th = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k)
                out.r[k] = rr * std::cos(th - 2.0 * M_PI * k / 3.0) + shift.real();
        } else {
            const double sq = std::sqrt(qr * qr / 4.0 + pr * pr * pr / 27.0);
            const double u = std::cbrt(-qr / 2.0 + sq), v = std::cbrt(-qr / 2.0 - sq);
            out.r[0] = u + v + shift.real();
            out.r[1] = cplx(-(u + v) / 2.0 + shift.real(), std::sqrt(3.0) / 2.0 * (u - v));
            out.r[2] = std::conj(out.r[1]);
        }
    } else {
        const cplx sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        cplx w = -q / 2.0 + sq;
        if (std::abs(-q / 2.0 - sq) > std::abs(w))
            w = -q / 2.0 - sq;
        const cplx u = cbrt_c(w);
        const cplx om(-0.5, std::sqrt(3.0) / 2.0);
        cplx uk = u;
        for (int k = 0; k < 3; ++k) {
            out.r[k] = uk - p / (3.0 * uk) + shift;
            uk *= om;
        }
    }

    // polish simple roots on the characteristic polynomial
    for (auto& r : out.r) {
        for (int it = 0; it < 3; ++it) {
            const cplx f = ((r + A) * r + B) * r + C;
            const cplx df = (3.0 * r + 2.0 * A) * r + B;
            if (std::abs(df) < 1e-300)
                break;
            r -= f / df;
        }
    }
    if constexpr (!is_complex_v<T>) {
        if (std::abs(out.r[1].imag()) > 0) {
            out.r[0] = out.r[0].real();
            out.r[2] = std::conj(out.r[1]);
        }
    }
    return out;
}

// right singular vectors belonging to the k smallest singular values
template <class T> Eigen::Matrix<T, 3, Eigen::Dynamic> nullspace(const Mat3<T>& m, int k)
{
    Eigen::JacobiSVD<Mat3<T>> svd(m, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(k);
}

template <class T> Vec3<T> pinv_solve(const Mat3<T>& m, const Vec3<T>& rhs, double rel = 1e-10)
{
    Eigen::JacobiSVD<Mat3<T>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Vec3<T> x = Vec3<T>::Zero();
    for (int i = 0; i < 3; ++i) {
        if (sv(i) <= rel * sv(0))
            continue;
        const T c = svd.matrixU().col(i).dot(rhs) / sv(i); // dot conjugates its left argument
        x += c * svd.matrixV().col(i);
    }
    return x;
}

// largest-magnitude component made positive (positive real part for complex)
template <class T> Vec3<T> canonical_sign(Vec3<T> v)
{
    int i = 0;
    v.cwiseAbs().maxCoeff(&i);
    double re;
    if constexpr (is_complex_v<T>)
        re = std::abs(v(i).real()) > 1e-12 * std::abs(v(i)) ? v(i).real() : v(i).imag();
    else
        re = v(i);
    return re < 0 ? Vec3<T>(-v) : v;
}

template <class T> int dominant_index(const Vec3<T>& v)
{
    int i = 0;
    v.cwiseAbs().maxCoeff(&i);
    return i;
}

template <class T> T B(const Vec3<T>& x, const Vec3<T>& y) { return killing<T>(x, y); }

template <class T> T sqrt_pos(T v, const char* what)
{
    if constexpr (is_complex_v<T>) {
        return std::sqrt(v);
    } else {
        if (!(v > 0))
            throw Error(std::string("reduce: expected positive Killing norm for ") + what);
        return std::sqrt(v);
    }
}

// Gram-Schmidt for the Killing form inside one eigenspace
template <class T>
std::vector<std::pair<Vec3<T>, int>> killing_gram_schmidt(std::vector<Vec3<T>> rem)
{
    std::vector<std::pair<Vec3<T>, int>> out;
    while (!rem.empty()) {
        size_t best = 0;
        double bestv = -1;
        for (size_t i = 0; i < rem.size(); ++i) {
            const double v = std::abs(B<T>(rem[i], rem[i])) / rem[i].squaredNorm();
            if (v > bestv) {
                bestv = v;
                best = i;
            }
        }
        if (bestv < 1e-6) {
            if (rem.size() < 2)
                throw Error("reduce: degenerate eigenspace for the Killing form");
            rem[0] = rem[0] + rem[1];
            continue;
        }
        Vec3<T> u = rem[best];
        rem.erase(rem.begin() + best);
        const T d = B<T>(u, u);
        for (auto& w : rem)
            w -= (B<T>(w, u) / d) * u;
        int sign = 1;
        if constexpr (is_complex_v<T>) {
            u /= std::sqrt(d);
        } else {
            sign = d > 0 ? 1 : -1;
            u /= std::sqrt(std::abs(d));
        }
        out.emplace_back(u, sign);
        for (auto& w : rem)
            if (w.norm() > 0)
                w /= w.norm();
    }
    return out;
}

template <class T> int delta_of(const Mat3<T>& P, Case kind)
{
    Vec3<T> br, v;
    if (kind == Case::One || kind == Case::Two) {
        br = bracket<T>(P.col(0), P.col(1));
        v = P.col(2);
    } else {
        br = bracket<T>(P.col(1), P.col(2));
        v = P.col(0);
    }
    return (br - v).norm() < (br + v).norm() ? 1 : -1;
}

template <class T> void reduce_case1(const Mat3<T>& phi, const Spectrum& sp, NormalForm<T>& nf)
{
    struct Item {
        Vec3<T> v;
        int sign;
        T lambda;
    };
    std::vector<Item> items;
    for (const auto& e : sp.eigenvalues) {
        const T lam = from_cplx<T>(e.value);
        auto K = nullspace<T>(phi - lam * Mat3<T>::Identity(), e.geo_mult);
        std::vector<Vec3<T>> cols;
        for (int j = 0; j < K.cols(); ++j)
            cols.push_back(K.col(j));
        for (auto& [v, s] : killing_gram_schmidt<T>(cols))
            items.push_back({canonical_sign<T>(v), s, lam});
    }
    if (items.size() != 3)
        throw Error("reduce: eigenvector count mismatch in diagonalizable case");

    if constexpr (is_complex_v<T>) {
        std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
            return dominant_index<T>(x.v) < dominant_index<T>(y.v);
        });
        items[2].v *= cplx(0, 1);
        items[2].v = canonical_sign<T>(items[2].v);
        items[2].sign = -1;
    } else {
        std::stable_sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
            if (x.sign != y.sign)
                return x.sign > y.sign;
            return dominant_index<T>(x.v) < dominant_index<T>(y.v);
        });
        if (items[0].sign != 1 || items[1].sign != 1 || items[2].sign != -1)
            throw Error("reduce: Killing form restricted to eigenvectors has wrong signature");
    }
    for (int k = 0; k < 3; ++k) {
        nf.P.col(k) = items[k].v;
        nf.params.lambda[k] = items[k].lambda;
    }
    if (delta_of<T>(nf.P, Case::One) < 0)
        nf.P.col(0) *= -1.0;
}

template <class T> void reduce_case2(const Mat3<T>& phi, const Spectrum& sp, NormalForm<T>& nf)
{
    if constexpr (is_complex_v<T>) {
        throw Error("reduce: complex-conjugate pair cannot occur over the complex field");
    } else {
        cplx mu, lam;
        for (const auto& e : sp.eigenvalues) {
            if (std::abs(e.value.imag()) == 0)
                mu = e.value;
            else if (e.value.imag() < 0)
                lam = e.value;
        }
        Vec3<double> v1 = nullspace<double>(phi - mu.real() * Mat3<double>::Identity(), 1).col(0);
        v1 = canonical_sign<double>(v1 / sqrt_pos(B<double>(v1, v1), "real eigenvector"));
        Mat3<cplx> pc = phi.template cast<cplx>();
        Vec3<cplx> V = nullspace<cplx>(pc - lam * Mat3<cplx>::Identity(), 1).col(0);
        const cplx H = killing<cplx>(V, V);
        V *= std::sqrt(2.0 / H);
        nf.P.col(0) = v1;
        nf.P.col(1) = V.real();
        nf.P.col(2) = V.imag();
        nf.params.mu = mu.real();
        nf.params.alpha = lam.real();
        nf.params.beta = lam.imag();
        if (delta_of<double>(nf.P, Case::Two) < 0)
            nf.P.col(0) *= -1.0;
    }
}

template <class T> void reduce_case3(const Mat3<T>& phi, const Spectrum& sp, NormalForm<T>& nf)
{
    const Mat3<T> I = Mat3<T>::Identity();
    T lam{}, mu{};
    bool triple = false;
    for (const auto& e : sp.eigenvalues) {
        if (e.alg_mult - e.geo_mult == 1) {
            lam = from_cplx<T>(e.value);
            triple = e.alg_mult == 3;
        }
    }
    if (triple)
        mu = lam;
    else
        for (const auto& e : sp.eigenvalues)
            if (e.alg_mult == 1)
                mu = from_cplx<T>(e.value);

    const Mat3<T> N = phi - lam * I;
    Vec3<T> v1, v2, v3;
    if (!triple) {
        v2 = nullspace<T>(N, 1).col(0);
        v3 = pinv_solve<T>(N, v2);
        v1 = nullspace<T>(phi - mu * I, 1).col(0);
    } else {
        Eigen::JacobiSVD<Mat3<T>> svd(N, Eigen::ComputeFullV);
        v3 = svd.matrixV().col(0);
        v2 = N * v3;
        auto K = svd.matrixV().rightCols(2);
        Eigen::Matrix<T, 2, 1> w = K.adjoint() * v2;
        Eigen::Matrix<T, 2, 1> y;
        if constexpr (is_complex_v<T>)
            y << std::conj(w(1)), -std::conj(w(0));
        else
            y << w(1), -w(0);
        v1 = K * y;
    }
    const T b11 = B<T>(v1, v1), b13 = B<T>(v1, v3), b23 = B<T>(v2, v3), b33 = B<T>(v3, v3);
    const T r11 = sqrt_pos<T>(b11, "the simple eigenvector");
    const Vec3<T> u1 = v1 / r11 - b13 / (b23 * r11) * v2;
    const Vec3<T> u2 = v2 / b23;
    const Vec3<T> u3 = v3 - b33 / (2.0 * b23) * v2;
    nf.P.col(0) = u1;
    nf.P.col(1) = u2;
    nf.P.col(2) = u3;
    nf.params.mu = mu;
    nf.params.lam = lam;
    nf.params.zeta = b23;
    if (delta_of<T>(nf.P, Case::Three) < 0)
        nf.P.col(0) *= -1.0;
}

template <class T> void reduce_case4(const Mat3<T>& phi, const Spectrum& sp, NormalForm<T>& nf)
{
    const T lam = from_cplx<T>(sp.eigenvalues.front().value);
    const Mat3<T> N = phi - lam * Mat3<T>::Identity();
    const Vec3<T> v2 = nullspace<T>(N, 1).col(0);
    const Vec3<T> v1 = pinv_solve<T>(N, v2);
    const Vec3<T> v3 = pinv_solve<T>(N, v1);
    const T b11 = B<T>(v1, v1), b13 = B<T>(v1, v3), b23 = B<T>(v2, v3), b33 = B<T>(v3, v3);
    const T K = -b13 / (2.0 * b11);
    const T L = -(b33 + 2.0 * K * b13 + K * K * b11) / (2.0 * b23);
    const Vec3<T> u1 = v1 + K * v2, u2 = v2, u3 = v3 + K * v1 + L * v2;
    const T s = sqrt_pos<T>(B<T>(u1, u1), "the chain vector");
    nf.P.col(0) = u1 / s;
    nf.P.col(1) = u2 / B<T>(u2, u3);
    nf.P.col(2) = u3;
    nf.params.lam = lam;
    nf.params.zeta = s;
    if (delta_of<T>(nf.P, Case::Four) < 0)
        nf.P *= -1.0;
}

} // namespace

template <class T> Spectrum spectrum3(const Mat3<T>& phi, const SpectrumOptions& opt)
{
    const double s = scale_of<T>(phi);
    CubicRoots cr = cubic_roots<T>(phi, s);
    std::array<cplx, 3> r = cr.r;
    std::sort(r.begin(), r.end(), [](cplx x, cplx y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });

    Spectrum sp;
    sp.tol_cluster = opt.cluster_rel * s;
    std::vector<std::vector<cplx>> groups;
    for (cplx v : r) {
        bool placed = false;
        for (auto& g : groups)
            if (std::abs(g.front() - v) <= sp.tol_cluster) {
                g.push_back(v);
                placed = true;
                break;
            }
        if (!placed)
            groups.push_back({v});
    }
    const Mat3<cplx> pc = phi.template cast<cplx>();
    for (auto& g : groups) {
        cplx mean = 0;
        for (cplx v : g)
            mean += v;
        mean /= double(g.size());
        const int alg = int(g.size());
        if (alg == 1) {
            // Rayleigh quotient against the Killing form; the left eigenvector of a self-adjoint map is G v
            const Mat3<cplx> G = killing_gram().cast<cplx>();
            for (int it = 0; it < 2; ++it) {
                const Vec3<cplx> v = nullspace<cplx>(pc - mean * Mat3<cplx>::Identity(), 1).col(0);
                const cplx n = (v.transpose() * G * v)(0);
                if (std::abs(n) < 1e-6)
                    break;
                mean = (v.transpose() * G * pc * v)(0) / n;
                if constexpr (!is_complex_v<T>)
                    if (g.front().imag() == 0)
                        mean = mean.real();
            }
        }
        Eigen::JacobiSVD<Mat3<cplx>> svd(pc - mean * Mat3<cplx>::Identity());
        int geo = 0;
        for (int i = 0; i < 3; ++i)
            if (svd.singularValues()(i) < opt.rank_rel * s)
                ++geo;
        if (geo > alg) {
            std::ostringstream os;
            os << "spectrum3: clustering ambiguity at eigenvalue " << mean << " (alg " << alg << ", rank deficit "
               << geo << ", singular values " << svd.singularValues().transpose() << ")";
            throw Error(os.str());
        }
        sp.eigenvalues.push_back({mean, alg, std::max(geo, 1)});
    }
    return sp;
}

Mat3<double> adapted_gram(Case kind)
{
    return (kind == Case::One || kind == Case::Two) ? killing_gram() : pseudo_gram();
}

template <class T> Mat3<T> template_matrix(Case kind, const CaseParams<T>& p)
{
    Mat3<T> m = Mat3<T>::Zero();
    switch (kind) {
    case Case::One:
        for (int i = 0; i < 3; ++i)
            m(i, i) = p.lambda[i];
        break;
    case Case::Two:
        m(0, 0) = p.mu;
        m(1, 1) = m(2, 2) = p.alpha;
        m(1, 2) = p.beta;
        m(2, 1) = -p.beta;
        break;
    case Case::Three:
        m(0, 0) = p.mu;
        m(1, 1) = m(2, 2) = p.lam;
        m(1, 2) = p.zeta;
        break;
    case Case::Four:
        m(0, 0) = m(1, 1) = m(2, 2) = p.lam;
        m(0, 2) = p.zeta;
        m(1, 0) = p.zeta;
        break;
    }
    return m;
}

template <class T> NormalForm<T> reduce(const Mat3<T>& phi, const SpectrumOptions& opt)
{
    const double s = scale_of<T>(phi);
    if (!check_self_adjoint<T>(phi, 1e-9 * std::max(1.0, s)))
        throw Error("reduce: matrix is not a Killing-self-adjoint isomorphism");

    NormalForm<T> nf;
    nf.spectrum = spectrum3<T>(phi, opt);
    bool pair = false;
    int defect = 0;
    for (const auto& e : nf.spectrum.eigenvalues) {
        if constexpr (!is_complex_v<T>)
            if (std::abs(e.value.imag()) > 0)
                pair = true;
        defect = std::max(defect, e.alg_mult - e.geo_mult);
    }
    if (pair)
        nf.kind = Case::Two;
    else
        nf.kind = defect == 0 ? Case::One : defect == 1 ? Case::Three : Case::Four;

    switch (nf.kind) {
    case Case::One: reduce_case1<T>(phi, nf.spectrum, nf); break;
    case Case::Two: reduce_case2<T>(phi, nf.spectrum, nf); break;
    case Case::Three: reduce_case3<T>(phi, nf.spectrum, nf); break;
    case Case::Four: reduce_case4<T>(phi, nf.spectrum, nf); break;
    }

    const Mat3<T> rec = nf.P * template_matrix<T>(nf) * nf.P.inverse();
    const double res = (rec - phi).cwiseAbs().maxCoeff();
    const double gres = (gram<T>(nf.P) - adapted_gram(nf.kind).template cast<T>()).cwiseAbs().maxCoeff();
    if (!(res <= 1e-8 * std::max(1.0, s)) || !(gres <= 1e-8)) {
        std::ostringstream os;
        os << "reduce: certification failed for case " << int(nf.kind) << " (reconstruction residual " << res
           << ", Gram residual " << gres << ")";
        throw Error(os.str());
    }
    nf.basis = classify_basis<T>(nf.P, 1e-7);
    return nf;
}

template <class T> InverseParams<T> invert_params(Case kind, const CaseParams<T>& p)
{
    auto inv = [](T v) {
        if (std::abs(v) == 0)
            throw Error("invert_params: zero eigenvalue, map is not invertible");
        return T(1.0) / v;
    };
    InverseParams<T> q;
    switch (kind) {
    case Case::One:
        for (int i = 0; i < 3; ++i)
            q.nu3[i] = inv(p.lambda[i]);
        break;
    case Case::Two: {
        q.eta = inv(p.mu);
        const T n2 = inv(p.alpha * p.alpha + p.beta * p.beta);
        q.gamma = p.alpha * n2;
        q.zeta = -p.beta * n2;
        break;
    }
    case Case::Three:
        q.eta = inv(p.mu);
        q.nu = inv(p.lam);
        q.zeta = p.zeta;
        break;
    case Case::Four:
        q.nu = inv(p.lam);
        q.zeta = p.zeta;
        break;
    }
    return q;
}

template <class T> Mat3<T> inverse_template(Case kind, const InverseParams<T>& q)
{
    Mat3<T> m = Mat3<T>::Zero();
    switch (kind) {
    case Case::One:
        for (int i = 0; i < 3; ++i)
            m(i, i) = q.nu3[i];
        break;
    case Case::Two:
        m(0, 0) = q.eta;
        m(1, 1) = m(2, 2) = q.gamma;
        m(1, 2) = q.zeta;
        m(2, 1) = -q.zeta;
        break;
    case Case::Three:
        m(0, 0) = q.eta;
        m(1, 1) = m(2, 2) = q.nu;
        m(1, 2) = -q.zeta * q.nu * q.nu;
        break;
    case Case::Four:
        m(0, 0) = m(1, 1) = m(2, 2) = q.nu;
        m(0, 2) = -q.zeta * q.nu * q.nu;
        m(1, 0) = -q.zeta * q.nu * q.nu;
        m(1, 2) = q.zeta * q.zeta * q.nu * q.nu * q.nu;
        break;
    }
    return m;
}

std::string to_string(Case c) { return std::to_string(int(c)); }

#define SLGEO_INST(T)                                                                              \
    template Spectrum spectrum3<T>(const Mat3<T>&, const SpectrumOptions&);                        \
    template Mat3<T> template_matrix<T>(Case, const CaseParams<T>&);                               \
    template NormalForm<T> reduce<T>(const Mat3<T>&, const SpectrumOptions&);                      \
    template InverseParams<T> invert_params<T>(Case, const CaseParams<T>&);                        \
    template Mat3<T> inverse_template<T>(Case, const InverseParams<T>&);

SLGEO_INST(double)
SLGEO_INST(cplx)

template Mat3<long double> inverse_template<long double>(Case, const InverseParams<long double>&);

} // namespace slgeo

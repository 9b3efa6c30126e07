#pragma once

#include "slgeo/algebra.hpp"

#include <vector>

namespace slgeo {

enum class Case { One = 1, Two = 2, Three = 3, Four = 4 };

struct EigenEntry {
    cplx value;
    int alg_mult = 1;
    int geo_mult = 1;
};

struct Spectrum {
    std::vector<EigenEntry> eigenvalues;
    double tol_cluster = 0;
};

struct SpectrumOptions {
    double cluster_rel = 1e-7; // eigenvalues closer than this * |Phi| are merged
    double rank_rel = 1e-8;    // singular values below this * |Phi| count as zero
};

template <class T> Spectrum spectrum3(const Mat3<T>& phi, const SpectrumOptions& opt = {});

// case parameters; unused fields stay zero
template <class T> struct CaseParams {
    std::array<T, 3> lambda{}; // case 1
    T mu{}, alpha{}, beta{};   // case 2 uses mu, alpha, beta; case 3 uses mu
    T lam{}, zeta{};           // cases 3, 4
};

template <class T> struct InverseParams {
    std::array<T, 3> nu3{}; // case 1
    T eta{}, gamma{}, nu{}, zeta{};
};

template <class T> struct NormalForm {
    Case kind = Case::One;
    CaseParams<T> params;
    Mat3<T> P = Mat3<T>::Identity(); // columns: adapted basis in standard coordinates
    BasisKind basis;
    Spectrum spectrum;
};

// matrix of Phi in the adapted basis
template <class T> Mat3<T> template_matrix(Case kind, const CaseParams<T>& p);
template <class T> Mat3<T> template_matrix(const NormalForm<T>& nf) { return template_matrix(nf.kind, nf.params); }

// Gram of the adapted basis: orthonormal for cases 1-2, pseudo-orthonormal for 3-4
Mat3<double> adapted_gram(Case kind);

template <class T> NormalForm<T> reduce(const Mat3<T>& phi, const SpectrumOptions& opt = {});

template <class T> InverseParams<T> invert_params(Case kind, const CaseParams<T>& p);
template <class T> InverseParams<T> invert_params(const NormalForm<T>& nf) { return invert_params(nf.kind, nf.params); }

// matrix of Phi^{-1} in the adapted basis, built from the inverse parameters
template <class T> Mat3<T> inverse_template(Case kind, const InverseParams<T>& q);

std::string to_string(Case c);

} // namespace slgeo

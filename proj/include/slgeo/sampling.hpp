#pragma once

#include "slgeo/normal_form.hpp"

#include <random>

namespace slgeo {

struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    int sign() { return std::bernoulli_distribution(0.5)(gen) ? 1 : -1; }
    // magnitude in [lo,hi] with random sign
    double signed_mag(double lo, double hi) { return sign() * uniform(lo, hi); }
    Vec3<double> unit3();
    std::mt19937_64 gen;
};

// Ad_g for g = exp(x), x with coordinates in [-spread, spread]
Mat3<double> random_isometry(Rng& rng, double spread = 0.8);
// (e1, (e2+e3)/sqrt2, (e2-e3)/sqrt2)
Mat3<double> pseudo_frame();

struct SampledPhi {
    Case kind;
    CaseParams<double> params;
    Mat3<double> P0; // adapted basis used to build phi
    Mat3<double> phi;
};

SampledPhi random_phi(Case kind, Rng& rng);
SampledPhi phi_from_template(Case kind, const CaseParams<double>& p, const Mat3<double>& P0);

} // namespace slgeo

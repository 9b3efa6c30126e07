#pragma once

#include "slgeo/integrator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace slgeo {

struct VerifyOptions {
    std::uint64_t seed = 7;
    bool perturb_gram = false; // fault injection: Killing Gram with an off-diagonal 1e-3
    double drift_bound = 1e-8;
    int samples = 1000;      // per algebraic suite
    int drift_starts = 100;  // per case
    double drift_span = 10;
    bool parallel = true;
};

struct SuiteResult {
    std::string name;
    long passed = 0, total = 0;
    double worst = 0; // largest residual seen, in the units of bound
    double bound = 0;
    bool ok() const { return total > 0 && passed == total; }
};

// shrinks z0 along its ray until the solution exists on [0, T]
Vec3<double> start_inside_domain(const EAField<double>& f, Vec3<double> z0, double T, const IntegratorOptions& opts = {});

SuiteResult drift_suite(const VerifyOptions& opt);
std::vector<SuiteResult> run_verify(const VerifyOptions& opt);

} // namespace slgeo

#pragma once

#include "slgeo/completeness.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>

namespace slgeo {

// independent stream for item i of a seeded sample
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

struct CrossCheckOptions {
    int starts = 10;       // random unit starts for complete metrics
    double horizon = 100;  // both time directions
    double pole_factor = 2; // incomplete metrics: blow-up expected within this multiple of |t*|
    IntegratorOptions integ = [] {
        IntegratorOptions o;
        o.keep_samples = false;
        return o;
    }();
};

struct CrossCheck {
    bool analytic_complete = true;
    bool numeric_complete = true;
    bool agree = true;
    double t_star = std::numeric_limits<double>::quiet_NaN(); // pole on the idempotent section
    double t_est = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

// analytic verdict against integration: idempotent blow-up or no blow-up from random starts
CrossCheck cross_check(const NormalForm<double>& nf, std::uint64_t seed, const CrossCheckOptions& opt = {});

struct SampleCheck {
    Mat3<double> phi;
    CrossCheck check;
};

// n random maps of one case, map i drawn from derive_seed(seed, case, i)
std::vector<SampleCheck> cross_validate(Case kind, int n, std::uint64_t seed, const CrossCheckOptions& opt,
                                        bool parallel);

struct ScanSpec {
    Case kind = Case::One;                      // One: grid over nu; Three: grid over (eta, nu, zeta)
    std::array<double, 2> range{0.1, 3.0};      // nu_i, or eta and nu
    std::array<double, 2> zeta_range{-2.0, 2.0}; // case 3 only
    int count = 21;
    bool numeric = false;
    std::uint64_t seed = 1;
    CrossCheckOptions check = [] {
        CrossCheckOptions o;
        o.starts = 2;
        return o;
    }();
};

struct ScanRow {
    std::array<double, 3> params{};
    double a = 0, b = 0;
    bool analytic_complete = true;
    std::optional<bool> numeric_complete;
    bool flagged = false;
    std::string note;
};

// rows in grid order: last parameter fastest
std::vector<ScanRow> scan(const ScanSpec& spec, bool parallel);
void write_scan_csv(std::ostream& out, const ScanSpec& spec, const std::vector<ScanRow>& rows);

} // namespace slgeo

#include "slgeo/scan.hpp"
#include "slgeo/verify.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace slgeo;

namespace {

double seconds(const std::function<void()>& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double ser, double par, bool same)
{
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name, ser, par, ser / par,
                same ? "identical" : "MISMATCH");
}

bool same_value(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

} // namespace

int main(int argc, char** argv)
{
    const int n = argc > 1 ? std::atoi(argv[1]) : 200;
    std::printf("threads: %d, maps per case: %d\n", omp_get_max_threads(), n);
    bool all_same = true;

    {
        CrossCheckOptions opt;
        opt.starts = 4;
        std::vector<SampleCheck> ser, par;
        const double ts = seconds([&] { ser = cross_validate(Case::Three, n, 11, opt, false); });
        const double tp = seconds([&] { par = cross_validate(Case::Three, n, 11, opt, true); });
        bool same = ser.size() == par.size();
        for (size_t i = 0; same && i < ser.size(); ++i)
            same = ser[i].phi == par[i].phi && ser[i].check.numeric_complete == par[i].check.numeric_complete &&
                   same_value(ser[i].check.t_est, par[i].check.t_est);
        report("cross-validate (case 3)", ts, tp, same);
        all_same = all_same && same;
    }
    {
        ScanSpec spec;
        spec.count = 9;
        spec.numeric = true;
        std::vector<ScanRow> ser, par;
        const double ts = seconds([&] { ser = scan(spec, false); });
        const double tp = seconds([&] { par = scan(spec, true); });
        bool same = ser.size() == par.size();
        for (size_t i = 0; same && i < ser.size(); ++i)
            same = ser[i].analytic_complete == par[i].analytic_complete && ser[i].numeric_complete == par[i].numeric_complete;
        report("numeric scan (case 1, 9^3)", ts, tp, same);
        all_same = all_same && same;
    }
    {
        VerifyOptions o;
        o.samples = 5 * n;
        std::vector<SuiteResult> ser, par;
        o.parallel = false;
        const double ts = seconds([&] { ser = run_verify(o); });
        o.parallel = true;
        const double tp = seconds([&] { par = run_verify(o); });
        bool same = ser.size() == par.size();
        for (size_t i = 0; same && i < ser.size(); ++i)
            same = ser[i].passed == par[i].passed && ser[i].worst == par[i].worst;
        report("verify suites", ts, tp, same);
        all_same = all_same && same;
    }
    return all_same ? 0 : 1;
}

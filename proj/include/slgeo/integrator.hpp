#pragma once

#include "slgeo/euler_arnold.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace slgeo {

struct IntegratorOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_norm = 1e8;  // blow-up needs |z| above this ...
    double min_step = 1e-12; // ... and the step below this
    long max_steps = 20'000'000;
    bool keep_samples = true;
};

void validate(const IntegratorOptions& o);

enum class Termination { SpanCompleted, BlowUp, StepCollapse, MaxSteps };
std::string to_string(Termination t);

template <class T> struct Sample {
    double s; // arc-length parameter along the time path
    T t;
    Vec3<T> z;
    Vec3<T> dz; // dz/ds
};

template <class T> struct Trajectory {
    std::vector<Sample<T>> samples;
    Termination termination = Termination::SpanCompleted;
    T t_end{};
    T t_est{}; // blow-up or collapse time estimate
    Vec3<T> z_end = Vec3<T>::Zero();
    double drift_I1 = 0, drift_I2 = 0;
    double integral_drift = 0; // max of the two
    double max_norm = 0;
    long steps = 0, rejected = 0;

    // cubic Hermite interpolation in the path parameter
    Vec3<T> dense(double s) const;
};

// dz/dt = f(z) over t in [span[0], span[1]] (backward when span[1] < span[0])
template <class T>
Trajectory<T> integrate(const EAField<T>& f, const Vec3<T>& z0, std::array<double, 2> span,
                        const IntegratorOptions& opts = {});

// arbitrary autonomous right-hand side, no first-integral monitoring
template <class T>
Trajectory<T> integrate_rhs(const std::function<Vec3<T>(const Vec3<T>&)>& rhs, const Vec3<T>& z0,
                            std::array<double, 2> span, const IntegratorOptions& opts = {});

struct RayPath {
    double theta = 0;
    double r_max = 1;
};

struct LoopPath {
    std::vector<cplx> vertices; // closed: first == last
};

// dz/ds = e^{i theta} f(z), s in [0, r_max]; times are t = e^{i theta} s
Trajectory<cplx> integrate_complex_ray(const EAField<cplx>& f, const Vec3<cplx>& z0, const RayPath& path,
                                       const IntegratorOptions& opts = {});

// integrates along one straight segment of complex time
Trajectory<cplx> integrate_complex_segment(const EAField<cplx>& f, const Vec3<cplx>& z0, cplx t0, cplx t1,
                                           const IntegratorOptions& opts = {});

// continuation around a closed polygon of complex times; returns |z_end - z0|
double monodromy_loop(const EAField<cplx>& f, const Vec3<cplx>& z0, const LoopPath& path,
                      const IntegratorOptions& opts = {});

// base -> polygon around center (counterclockwise, closed) -> base
LoopPath square_loop(cplx base, cplx center, double side);
LoopPath circle_loop(cplx base, cplx center, double radius, int n);

} // namespace slgeo

#pragma once

#include "slgeo/euler_arnold.hpp"
#include "slgeo/integrator.hpp"

#include <optional>
#include <vector>

namespace slgeo {

struct MetricVerdict {
    bool complete = true;
    std::optional<double> criterion_value; // the product tested, or the largest eigenspace dimension (complex)
    std::string criterion_id;
};

MetricVerdict metric_verdict(const NormalForm<double>& nf);
MetricVerdict metric_verdict(const NormalForm<cplx>& nf);

// ray s * section with s' = kappa s^2; section has third coordinate 1
template <class T> struct IdempotentRay {
    Vec3<T> section = Vec3<T>::Zero();
    Vec3<T> direction = Vec3<T>::Zero(); // unit vector along section
    T kappa{};                            // growth constant on the section
    T kappa_unit{};                       // growth constant on the unit direction
    double residual = 0;                  // |f(section) - kappa section|
};

template <class T> std::vector<IdempotentRay<T>> find_idempotents(const EAField<T>& f);

// pole of s(t) = s0 / (1 - kappa s0 t), s0 measured along the section
template <class T> T blowup_time(const IdempotentRay<T>& ray, T s0);

enum class GeodesicClass { PointGeodesic, Complete, HalfComplete, BoundedInterval, NotImplemented };
std::string to_string(GeodesicClass c);

enum class TimeSide { Future, Past };
std::string to_string(TimeSide s);

struct GeodesicVerdict {
    GeodesicClass cls = GeodesicClass::Complete;
    TimeSide complete_side = TimeSide::Future; // HalfComplete: the side that extends forever
    std::optional<std::array<double, 2>> endpoints; // (t-, t+), infinite on complete sides
    bool extrapolated = false;                      // the leaf is not covered by an explicit argument
    std::string rule;
};

// z0 in the coordinates of the field (adapted basis)
GeodesicVerdict geodesic_verdict(const EAField<double>& f, const Vec3<double>& z0, double tol = 1e-9);
// z0 in standard coordinates
GeodesicVerdict geodesic_verdict(const NormalForm<double>& nf, const Vec3<double>& z0, double tol = 1e-9);

// maximal interval estimated by integrating both ways up to |t| = horizon
std::array<double, 2> estimate_endpoints(const EAField<double>& f, const Vec3<double>& z0, double horizon,
                                         const IntegratorOptions& opts = {});

enum class CausalType { Spacelike, Null, Timelike };
std::string to_string(CausalType c);

CausalType causal_type(const EAField<double>& f, const Vec3<double>& z0, double tol = 1e-10);
CausalType causal_type(const NormalForm<double>& nf, const Vec3<double>& z0, double tol = 1e-10);

struct CompleteMetric {
    std::array<double, 3> nu{};    // diagonal of Phi^{-1} in an orthonormal basis, e3 timelike
    std::array<double, 3> J{};     // coefficients of J = sign I2 - I1 on z1^2, z2^2, z3^2
    int sign = 1;
};

// r in {0, 1}; r in {-1, -2} mirror r in {0, 1} under Phi -> -Phi
CompleteMetric build_complete_metric(int r);

} // namespace slgeo

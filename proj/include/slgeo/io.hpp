#pragma once

#include "slgeo/charts.hpp"
#include "slgeo/completeness.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace slgeo {

struct InputError : Error {
    using Error::Error;
};

// Phi in the standard basis; only the matrix of the declared mode is filled
struct PhiInput {
    Field mode = Field::Real;
    Mat3<double> real = Mat3<double>::Zero();
    Mat3<cplx> complex = Mat3<cplx>::Zero();
};

// key = value lines and a `phi =` key followed by three rows; complex entries are re,im
PhiInput parse_phi(std::istream& in);
PhiInput load_phi(const std::string& path);

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& what);
Vec3<double> parse_vec3(const std::string& text);
Vec3<cplx> parse_cvec3(const std::string& text); // entries re or re:im
LoopPath load_loop(const std::string& path);     // one re,im complex time per line

std::string fmt17(double x);

nlohmann::json to_json(cplx x);
nlohmann::json classify_report(const NormalForm<double>& nf);
nlohmann::json classify_report(const NormalForm<cplx>& nf);
nlohmann::json verdict_report(const NormalForm<double>& nf, const Vec3<double>& z0, double tol);
nlohmann::json idempotents_report(const NormalForm<double>& nf);
nlohmann::json idempotents_report(const NormalForm<cplx>& nf);

// z is written in the standard basis, z = P z_adapted
void write_trajectory_csv(std::ostream& out, const Trajectory<double>& tr, const Mat3<double>& P);
void write_trajectory_csv(std::ostream& out, const Trajectory<cplx>& tr, const Mat3<cplx>& P);

struct PortraitOptions {
    int leaves = 12;
    int points = 400;
    double window = 5;
    std::uint64_t seed = 1;
};

// singular points at infinity and sampled leaves in the X chart
void write_portrait_csv(std::ostream& out, const EAField<double>& f, const PortraitOptions& opt);

} // namespace slgeo

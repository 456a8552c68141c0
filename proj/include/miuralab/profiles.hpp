#pragma once

#include <cmath>
#include <string>

#include "miuralab/grid.hpp"

namespace miuralab {

enum class ProfileKind { soliton, kink, eta, phi, psi, quadform_potential };

ProfileKind parse_profile_kind(const std::string& name);
std::string to_string(ProfileKind kind);

struct ProfileSpec {
    ProfileKind kind = ProfileKind::soliton;
    double c = 4.0;
    double lambda = 1.0;
    double x0 = 0.0;
    double R = 10.0;
    double delta = std::exp(-20.0);
    double A = 20.0;
    double gamma = 1.0;
    double t = 0.0;
    double y = 0.0;
};

void validate(const ProfileSpec& spec);
Field render_profile(const ProfileSpec& spec, const Grid& grid);

enum class TravelingKind { soliton, kink };
// c is used for solitons, lambda for kinks; x0 shifts the initial position.
Field exact_solution(TravelingKind kind, const ProfileSpec& params, double t, const Grid& grid);

namespace profiles {

inline double sech(double x) { return 1.0 / std::cosh(x); }
inline double sech2(double x) {
    double s = sech(x);
    return s * s;
}

// -(c/2) sech^2(sqrt(c) x / 2)
double soliton(double c, double x);
// lambda tanh(lambda x + 2 lambda^3 t)
double kink(double lambda, double x, double t);

double eta(double x, double R, double delta);
double eta_x(double x, double R);
double eta_xx(double x, double R);
double eta_xxx(double x, double R);

double phi(double t, double x, double x0, double A, double gamma);
double psi(double x, double R, double delta);

// -2 sech^2 x - 4 sech^2 x tanh x
double quadform_potential(double x);
// e^{x/2} sech^2 x, not normalized.
double u_star(double x);

}  // namespace profiles
}  // namespace miuralab

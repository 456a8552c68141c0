#include "miuralab/profiles.hpp"

#include "miuralab/errors.hpp"

namespace miuralab {

namespace profiles {

double soliton(double c, double x) { return -0.5 * c * sech2(0.5 * std::sqrt(c) * x); }

double kink(double lambda, double x, double t) {
    return lambda * std::tanh(lambda * x + 2.0 * lambda * lambda * lambda * t);
}

double eta(double x, double R, double delta) { return std::tanh(0.5 * (x - R)) + 1.0 + delta; }

double eta_x(double x, double R) { return 0.5 * sech2(0.5 * (x - R)); }

double eta_xx(double x, double R) {
    double z = 0.5 * (x - R);
    return -0.5 * sech2(z) * std::tanh(z);
}

double eta_xxx(double x, double R) {
    double z = 0.5 * (x - R);
    double s2 = sech2(z);
    double th = std::tanh(z);
    return -0.25 * s2 * (s2 - 2.0 * th * th);
}

double phi(double t, double x, double x0, double A, double gamma) {
    return 1.0 + std::tanh((x - x0 + gamma * t) / A);
}

double psi(double x, double R, double delta) { return eta(x, R, delta) * sech2(x); }

double quadform_potential(double x) {
    double s2 = sech2(x);
    return -2.0 * s2 - 4.0 * s2 * std::tanh(x);
}

double u_star(double x) {
    // e^{x/2} sech^2 x = 4 e^{x/2} / (e^x + e^{-x})^2, written to avoid overflow.
    double ax = std::abs(x);
    double e = std::exp(-2.0 * ax);
    return 4.0 * std::exp(0.5 * x - 2.0 * ax) / ((1.0 + e) * (1.0 + e));
}

}  // namespace profiles

ProfileKind parse_profile_kind(const std::string& name) {
    if (name == "soliton") return ProfileKind::soliton;
    if (name == "kink") return ProfileKind::kink;
    if (name == "eta") return ProfileKind::eta;
    if (name == "phi") return ProfileKind::phi;
    if (name == "psi") return ProfileKind::psi;
    if (name == "quadform_potential") return ProfileKind::quadform_potential;
    throw ValidationError("unknown profile kind: " + name);
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::soliton: return "soliton";
        case ProfileKind::kink: return "kink";
        case ProfileKind::eta: return "eta";
        case ProfileKind::phi: return "phi";
        case ProfileKind::psi: return "psi";
        case ProfileKind::quadform_potential: return "quadform_potential";
    }
    return "soliton";
}

void validate(const ProfileSpec& s) {
    switch (s.kind) {
        case ProfileKind::soliton:
            if (!(s.c > 0.0)) throw ValidationError("soliton speed c must be positive");
            break;
        case ProfileKind::kink:
            if (!(s.lambda > 0.0)) throw ValidationError("kink lambda must be positive");
            break;
        case ProfileKind::eta:
        case ProfileKind::psi:
            if (!(s.delta > 0.0)) throw ValidationError("eta delta must be positive");
            if (!std::isfinite(s.R)) throw ValidationError("eta R must be finite");
            break;
        case ProfileKind::phi:
            if (!(s.A > 0.0)) throw ValidationError("phi A must be positive");
            break;
        case ProfileKind::quadform_potential:
            break;
    }
}

Field render_profile(const ProfileSpec& s, const Grid& grid) {
    validate(s);
    using namespace profiles;
    switch (s.kind) {
        case ProfileKind::soliton:
            return Field::sample(grid, [&](double x) { return soliton(s.c, x - s.x0); });
        case ProfileKind::kink:
            return Field::sample(grid, [&](double x) { return kink(s.lambda, x - s.x0, s.t); });
        case ProfileKind::eta:
            return Field::sample(grid, [&](double x) { return eta(x - s.y, s.R, s.delta); });
        case ProfileKind::phi:
            return Field::sample(grid, [&](double x) { return phi(s.t, x, s.x0, s.A, s.gamma); });
        case ProfileKind::psi:
            return Field::sample(grid, [&](double x) { return psi(x - s.y, s.R, s.delta); });
        case ProfileKind::quadform_potential:
            return Field::sample(grid, [](double x) { return quadform_potential(x); });
    }
    throw ValidationError("unknown profile kind");
}

Field exact_solution(TravelingKind kind, const ProfileSpec& p, double t, const Grid& grid) {
    ProfileSpec s = p;
    if (kind == TravelingKind::soliton) {
        s.kind = ProfileKind::soliton;
        s.x0 = p.x0 + p.c * t;
    } else {
        s.kind = ProfileKind::kink;
        s.t = t;
    }
    return render_profile(s, grid);
}

}  // namespace miuralab

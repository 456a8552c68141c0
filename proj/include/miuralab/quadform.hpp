#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "miuralab/grid.hpp"

namespace miuralab {

enum class FormKind { B, B_eps_R, B_hat };
FormKind parse_form_kind(const std::string& name);
std::string to_string(FormKind kind);

struct QuadFormKind {
    FormKind form = FormKind::B;
    double epsilon = std::exp(-20.0);  // B_eps_R and B_hat only
    double R = 10.0;
};

void validate(const QuadFormKind& kind);

enum class Metric { L2, H1 };
Metric parse_metric(const std::string& name);
std::string to_string(Metric m);

// Potential of the form, including the 5/4 shift.
double form_potential(const QuadFormKind& kind, double x);

// v with the rank-one term written as 2 <v, f>^2: e^{x/2} sech^2 x for B and
// B_eps_R, e^{R/2} eta_x^{-1/2} eta sech^2 for B_hat.
double rank_one_profile(const QuadFormKind& kind, double x);

// int f_x^2 + V f^2, plus the rank-one term for B_hat.
double eval_form(const QuadFormKind& kind, const Field& f);

struct CoercivityOptions {
    double L = 40.0;
    int N = 2048;
    bool refine = true;  // repeat on 2N points
};

struct CoercivityReport {
    QuadFormKind kind;
    Metric metric = Metric::L2;
    bool rank_one = true;
    double min_eigenvalue = 0.0;
    double L = 0.0;
    int N = 0;
    std::optional<double> refined_eigenvalue;  // on 2N points
    std::optional<double> refinement_change;
    std::optional<double> claimed_bound;  // claimed lower bound, where one is stated
    int lanczos_iterations = 0;
};

// Smallest mu with (form) f = mu (metric) f on the periodic grid. For B_hat the
// rank-one term is its own; for the other kinds it is 2 <e^{x/2} sech^2, f>^2.
CoercivityReport coercivity(const QuadFormKind& kind, Metric metric, bool rank_one,
                            const CoercivityOptions& options = {});

// h(s) = (-5/4 + g) / (s + g) with g = (567/320 - |s|^{3/2})^{2/3}.
double overlap_bound_h(double s);

struct HMinimum {
    double s = 0.0;
    double h = 0.0;
};
// Dense sampling of h over [-(567/320)^{2/3}, -5/4].
HMinimum h_minimum_sampled(int samples = 200001);
HMinimum h_minimum_closed_form();

struct LiebThirringReport {
    double support_left = 0.0;  // V < 0 on (support_left, inf)
    double integral = 0.0;      // (3/16) int |V|_-^2
    double bound_exponent_value = 0.0;  // integral^{2/3}
    double e0 = 0.0;
    double rayleigh = 0.0;    // <H u, u> at the normalized u = sqrt(2/pi) e^{x/2} sech^2
    double overlap_sq = 0.0;  // <u, v0>^2
    double overlap_lower_bound = 0.0;  // h at the computed e0
    HMinimum h_min_sampled;
    HMinimum h_min_closed;
    double L = 0.0;
    int N = 0;
};

LiebThirringReport lieb_thirring_report(double L = 40.0, int N = 2048);

}  // namespace miuralab

#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "miuralab/evolution.hpp"
#include "miuralab/grid.hpp"
#include "miuralab/profiles.hpp"

namespace miuralab {

// Commands understood by the CLI; each has its own default configuration.
const std::vector<std::string>& known_commands();

enum class PerturbationKind { none, gaussian, sech, noise };
PerturbationKind parse_perturbation_kind(const std::string& name);
std::string to_string(PerturbationKind k);

enum class Normalization { peak, l2 };

struct PerturbationConfig {
    PerturbationKind kind = PerturbationKind::none;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
    Normalization normalization = Normalization::peak;
    std::uint64_t seed = 0;
    int modes = 8;  // noise: number of random Fourier modes under the envelope
};

// gaussian exp(-(x-c)^2 / (2 w^2)), sech((x-c)/w), or seeded noise under the
// gaussian envelope, scaled so the peak or the L2 norm equals the amplitude.
Field render_perturbation(const PerturbationConfig& p, const Grid& grid);

struct WeightConfig {
    double R = 10.0;
    double delta = std::exp(-20.0);
    double A = 20.0;
    double x0 = 0.0;
    double gamma = 1.0;
    std::vector<double> A_values = {10.0, 20.0, 40.0};  // phi-weight sensitivity
};

struct ToleranceConfig {
    double invert = 1e-8;
    double ground_state = 1e-10;
    double modulation = 1e-10;
    double edge = 1e-8;
};

struct QuadformConfig {
    double L = 40.0;
    int N = 2048;
    double epsilon = std::exp(-20.0);
    double R = 10.0;
    bool refine = true;
};

struct ExperimentConfig {
    std::string command = "simulate";
    std::string name = "run";
    std::string output_dir = "runs";
    ModelKind model = ModelKind::kdv;
    double L = 50.0;
    int N = 2048;
    StepConfig stepping;
    SpongeSpec sponge;
    ProfileSpec profile;
    PerturbationConfig perturbation;
    WeightConfig weights;
    ToleranceConfig tolerances;
    std::optional<std::string> field_path;  // simulate: initial data, invert: target
    std::string branch = "f-star";          // invert
    std::optional<double> invert_lambda;    // invert, f-lambda branch
    std::vector<int> sobolev_indices = {0, 1};            // decay
    std::vector<double> amplitudes = {0.1, 0.2, 0.4};     // apriori
    int identity_pairs = 20;                               // identity-check
    QuadformConfig quadform;
    std::string snapshot_format = "json";

    Grid grid() const { return make_grid(L, N); }
};

ExperimentConfig default_config(const std::string& command);

// Overlays the keys present in j onto the command's defaults. Unknown keys and
// type mismatches raise ValidationError.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& command);
ExperimentConfig load_config(const std::string& path, const std::string& command);
nlohmann::json config_to_json(const ExperimentConfig& c);

void validate(const ExperimentConfig& c);

}  // namespace miuralab

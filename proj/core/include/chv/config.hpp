#ifndef CHV_CONFIG_HPP
#define CHV_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chv/forward_model.hpp"
#include "chv/scenes.hpp"
#include "chv/solver.hpp"

namespace chv {

struct MasksConfig {
    std::string type = "partition"; // partition | bernoulli
    int superpixel = 4;
    double density = 0.1;           // bernoulli only
};

struct SceneConfig {
    std::string preset;             // two_plane | fibers | particles | "" (explicit objects)
    int particle_count = 7;
    std::vector<SceneObject> objects;
};

struct NoiseConfig {
    std::string model = "none";     // none | gaussian
    double sigma = 0.0;
};

struct SolverSettings {
    double lambda_spatial = -1.0;   // < 0: auto (0.01 * max |A^T g|)
    double lambda_temporal = 0.0;
    int max_iters = 200;
    double tol = 1e-5;
    int tv_inner_iters = 10;
    bool enforce_monotone = true;
    bool project_real = false;
    double twist_alpha = 0.0;
    double twist_beta = 0.0;
    int norm_iterations = 30;
};

struct ReconstructConfig {
    std::string method = "both";    // cs | bp | both
    std::string hologram = "subtracted.chv";
    std::string masks_index = "masks/index.json";
};

struct AnalysisConfig {
    std::string input = "recon_cs.chv";
    int window = 21;
    double reject_threshold = 0.5;
    double max_jump = 3e-3;         // meters per frame
    std::vector<std::pair<int, int>> profile_pixels;
};

struct BenchmarkConfig {
    std::vector<double> fractions{1.0, 0.5, 0.2, 0.1};
    std::vector<double> dz{0.005, 0.015, 0.030};
    double base_depth = 0.07;
    int intermediate_planes = 4;
    // when set, run exactly one (fraction, dz) cell
    std::optional<std::pair<double, double>> single_cell;
};

/// One config file drives every subcommand. Units are SI throughout.
/// Geometry defaults follow the reference bench: 532 nm illumination,
/// 5.86 um sensor pitch, 500 us per mask pattern.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    Geometry geometry;
    MasksConfig masks;
    SceneConfig scene;
    NoiseConfig noise;
    SolverSettings solver;
    ReconstructConfig reconstruct;
    AnalysisConfig analysis;
    BenchmarkConfig benchmark;

    ExperimentConfig();

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string canonical_json() const;

    SolverConfig solver_config() const; // lambda resolved separately
    NoiseSpec noise_spec() const;
};

std::string config_hash_hex(const ExperimentConfig& cfg);

} // namespace chv

#endif

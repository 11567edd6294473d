#ifndef CHV_EXPERIMENTS_HPP
#define CHV_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "chv/config.hpp"

namespace chv {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Subcommand drivers. Each writes its data files plus a manifest.json
/// into cfg.output_dir and returns an exit code. I/O and config problems
/// throw (the CLI maps exceptions to exit codes); validation failures
/// return kExitValidation directly so the report still gets written.
int run_masks(const ExperimentConfig& cfg, bool quiet = false);
int run_simulate(const ExperimentConfig& cfg, bool quiet = false);
int run_reconstruct(const ExperimentConfig& cfg, bool quiet = false);
int run_analyze(const ExperimentConfig& cfg, bool quiet = false);
int run_benchmark(const ExperimentConfig& cfg, int jobs = 1, bool quiet = false);

/// One benchmark sweep cell (also the unit the acceptance suite drives).
struct BenchmarkCell {
    double fraction = 1.0;
    double dz = 0.0;
    int frame_count = 1;
    double psnr_cs = 0.0;
    double psnr_bp = 0.0;
    double lambda = 0.0;
    int iterations = 0;
    bool ok = false;
    std::string error;
};

/// Simulate + reconstruct (CS and per-frame BP) one (fraction, dz) cell of
/// the subsampling/depth sweep and score both against the ground truth.
BenchmarkCell run_benchmark_cell(const ExperimentConfig& cfg, double fraction, double dz);

/// Scene construction from config (preset or explicit objects).
SceneSpec scene_from_config(const ExperimentConfig& cfg);
MaskStack masks_from_config(const ExperimentConfig& cfg);

} // namespace chv

#endif

#ifndef CHV_SOLVER_HPP
#define CHV_SOLVER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chv/forward_model.hpp"

namespace chv {

struct SolverConfig {
    double lambda_spatial = 0.0;   // weight on x/y/z differences
    double lambda_temporal = 0.0;  // weight on t differences; 0 decouples frames
    int max_iters = 200;
    double tol = 1e-5;             // relative objective-change stop threshold
    double twist_alpha = 0.0;      // <= 0: derive from spectral_floor
    double twist_beta = 0.0;
    double spectral_floor = 1e-3;  // assumed min eigenvalue of A^T A / c
    int tv_inner_iters = 10;
    bool enforce_monotone = true;
    bool project_real = false;     // zero the imaginary part each iteration
    int norm_iterations = 30;      // power iterations for the step scale
    std::uint64_t norm_seed = 0x5EED0C0DEULL;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    double data_fit = 0.0;  // 1/2 ||g - A(o)||^2
    double tv = 0.0;        // weighted TV of o
    double objective = 0.0; // data_fit + lambda * tv
    double step_norm = 0.0; // ||o_k - o_{k-1}||
    double time_ms = 0.0;   // wall time since solve start
};

struct SolveTrace {
    std::vector<IterationRecord> records;
    bool converged = false;
    bool aborted = false;
    int stalls = 0;
    double operator_norm = 0.0;
    double step_scale_c = 0.0;
    double lambda_used = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// CSV columns: iteration,data_fit,tv,objective,time_ms
void write_trace_csv(const SolveTrace& trace, const std::string& path);

/// Weighted isotropic 4D total variation: sum over voxels of
/// sqrt(dx^2 + dy^2 + dz^2 + (w_t dt)^2) with w_t = lambda_temporal /
/// lambda_spatial, forward differences, zero at the upper boundaries.
/// Real and imaginary parts contribute independently and are summed.
double tv_norm(const Object4D& obj, const SolverConfig& cfg);

/// Approximate proximal map of weight * TV via Chambolle dual projection
/// (cfg.tv_inner_iters sweeps). weight = 0 returns the input unchanged.
Object4D tv_denoise(const Object4D& obj, double weight, const SolverConfig& cfg);

/// Two-step iterative shrinkage/thresholding on
///   min_o 1/2 ||g - A(o)||^2 + lambda * TV(o).
/// The step scale c is the squared operator-norm estimate; the denoiser is
/// tv_denoise. With enforce_monotone an increasing step falls back to the
/// one-step (IST) update, and if that still increases the iterate stays put
/// and c is doubled.
std::pair<Object4D, SolveTrace> twist_reconstruct(const Hologram& g, const MaskStack& masks,
                                                  const Geometry& geom, const SolverConfig& cfg,
                                                  const Object4D* init = nullptr);
std::pair<Object4D, SolveTrace> twist_reconstruct(const SensingOperator& op,
                                                  const Hologram& g, const SolverConfig& cfg,
                                                  const Object4D* init = nullptr);

/// lambda heuristic: 0.01 * max |A^T g|.
double default_lambda(const SensingOperator& op, const Hologram& g);

/// Conjugate-kernel refocusing of the hologram to every depth plane,
/// replicated across frames. No regularization; the classical baseline.
Object4D backpropagate(const Hologram& g, const Geometry& geom);

/// Per-frame variant: frame t refocuses M_t .* g, compensating the mask
/// density so amplitudes stay comparable across frames.
Object4D backpropagate(const Hologram& g, const MaskStack& masks, const Geometry& geom);

} // namespace chv

#endif

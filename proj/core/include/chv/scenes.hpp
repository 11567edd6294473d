#ifndef CHV_SCENES_HPP
#define CHV_SCENES_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "chv/forward_model.hpp"

namespace chv {

enum class SceneKind { two_plane, moving_particles, static_fibers };
enum class ObjectShape { disk, bar, fiber };

/// One scene element. Coordinates are meters relative to the grid center;
/// pixel (ix, iy) sits at ((ix - nx/2) * pitch, (iy - ny/2) * pitch).
/// Moving objects translate by (vx, vy) * frame_interval per frame and are
/// stamped at the nearest grid position, so rasterized centroids land
/// exactly on pixels.
struct SceneObject {
    ObjectShape shape = ObjectShape::disk;
    int depth_index = 0;
    double amplitude = 0.1;  // (0, 1]: sparse-object regime
    double x0 = 0.0, y0 = 0.0;
    double vx = 0.0, vy = 0.0;   // m/s
    double size = 0.0;           // disk diameter / bar and fiber width, meters
    double length = 0.0;         // bar/fiber extent along its axis
    double angle = 0.0;          // axis orientation, radians
    double curve_amplitude = 0.0; // fiber: lateral sine amplitude
    double curve_cycles = 1.0;    // fiber: sine cycles along the length
};

struct SceneSpec {
    SceneKind kind = SceneKind::two_plane;
    int nx = 0, ny = 0;
    double pitch = 0.0;
    std::vector<double> depths;  // plane distances, must match the geometry
    int frame_count = 1;
    double frame_interval = 0.0; // seconds; scales velocities into steps
    std::vector<SceneObject> objects;

    void validate() const;
};

struct NoiseSpec {
    enum class Model { none, gaussian };
    Model model = Model::none;
    double sigma = 0.0; // std relative to the mean background level
    std::uint64_t seed = 0;
};

/// Rasterizes the scene into the 4D complex object field. Deterministic;
/// throws if any object leaves the grid in any frame.
Object4D build_scene(const SceneSpec& spec);

/// Full nonlinear capture: per frame the intensity |O_c + R_c|^2 with the
/// reference passed through the same mask/propagation pipeline, summed
/// over frames with weight tau, plus optional Gaussian noise. The
/// background output is the identical pipeline with a zero object, so
/// subtract_background(raw, background) = forward(obj) + quadratic term
/// (+ noise): the model mismatch the linear solver has to live with.
std::pair<Hologram, Hologram> simulate_capture(const Object4D& obj, const MaskStack& masks,
                                               const Geometry& geom, const NoiseSpec& noise);

/// 10*log10(peak^2 / MSE) over the 4D volume, on |.| of the complex
/// fields; peak = max |truth|. Capped at 300 dB when MSE is zero.
double psnr(const Object4D& recon, const Object4D& truth);

/// Least-squares scalar fit argmin_a ||a*|recon| - |truth|||; used to put
/// reconstructions with arbitrary global scale (back-propagation) on a
/// comparable footing before PSNR.
double fit_scale(const Object4D& recon, const Object4D& truth);
double psnr_fitted(const Object4D& recon, const Object4D& truth);

// Procedural stand-ins for imagery that does not ship with the studies.

/// Static two-layer scene: organism-like curved fibers and small shapes at
/// two scales, on the first and last depth planes.
SceneSpec preset_two_plane(int nx, int ny, double pitch, const std::vector<double>& depths,
                           int frame_count, double frame_interval);

/// Two static fibers on the given planes (depth-sectioning stand-in).
SceneSpec preset_fibers(int nx, int ny, double pitch, const std::vector<double>& depths,
                        int plane_a, int plane_b, int frame_count, double frame_interval);

/// Up to 7 small disks with constant integer-pixel-per-frame velocities
/// split across two depth planes; speeds are exact multiples of
/// pitch / frame_interval so ground-truth tracks land on the grid.
SceneSpec preset_particles(int nx, int ny, double pitch, const std::vector<double>& depths,
                           int count, int frame_count, double frame_interval);

} // namespace chv

#endif

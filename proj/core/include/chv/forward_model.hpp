#ifndef CHV_FORWARD_MODEL_HPP
#define CHV_FORWARD_MODEL_HPP

#include <cstdint>
#include <vector>

#include "chv/field.hpp"
#include "chv/masks.hpp"
#include "chv/propagation.hpp"

namespace chv {

/// Everything that defines the sensing operator: grid, optics distances,
/// depth planes and frame timing. Distances are measured along +z:
/// object plane n sits depths[n] before the observation plane, the coded
/// mask sits observation_to_mask after it, the sensor mask_to_sensor
/// after the mask (0 = the lens relay images the mask onto the sensor
/// and that leg collapses to the identity).
struct Geometry {
    int nx = 0, ny = 0;
    double pitch = 0.0;
    double wavelength = 0.0;
    std::vector<double> depths;          // d_n, strictly increasing, > 0
    double observation_to_mask = 0.0;    // z1 - z0
    double mask_to_sensor = 0.0;         // z2 - z1
    int frame_count = 1;                 // T
    double frame_interval = 0.0;         // tau, seconds
    int pad_factor = 2;

    int depth_count() const { return static_cast<int>(depths.size()); }
    void validate() const;
};

/// Complex object field over (frame, depth plane, y, x).
struct Object4D {
    int T = 0, nd = 0, ny = 0, nx = 0;
    CVector data; // index ((t*nd + n)*ny + iy)*nx + ix

    Object4D() = default;
    Object4D(int T_, int nd_, int ny_, int nx_);
    static Object4D like(const Geometry& g);

    std::size_t slice_offset(int t, int n) const {
        return (static_cast<std::size_t>(t) * nd + n) * ny * nx;
    }
    cdouble* slice(int t, int n) { return data.data() + slice_offset(t, n); }
    const cdouble* slice(int t, int n) const { return data.data() + slice_offset(t, n); }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Object4D& o) const {
        return T == o.T && nd == o.nd && ny == o.ny && nx == o.nx;
    }
};

enum class HologramKind { raw, background, subtracted };

/// 2D real intensity record. raw/background are non-negative;
/// subtracted may be signed.
struct Hologram {
    int nx = 0, ny = 0;
    HologramKind kind = HologramKind::subtracted;
    RVector data;

    Hologram() = default;
    Hologram(int nx_, int ny_, HologramKind kind_);
    double& at(int iy, int ix) { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    double at(int iy, int ix) const { return data[static_cast<std::size_t>(iy) * nx + ix]; }
};

const char* to_string(HologramKind k);

/// Matrix-free realization of the coded-exposure sensing operator
///
///   g = tau * sum_t 2 Re{ P_h2( M_t . P_h1( sum_n P_dn(O_tn) ) ) }
///
/// and its exact adjoint. The Toeplitz blocks of the factorization are
/// never materialized; each is an FFT convolution, a sample-wise mask
/// multiply or a frame sum. Precomputes one transfer function per depth
/// (already combined with the observation-to-mask leg) so repeated
/// applications inside a solver are cheap.
///
/// Const methods are reentrant; per-frame work runs in parallel with a
/// fixed reduction order, so outputs are bit-reproducible.
class SensingOperator {
public:
    SensingOperator(const Geometry& geom, const MaskStack& masks);

    Hologram forward(const Object4D& obj) const;
    Object4D adjoint(const Hologram& holo) const;

    const Geometry& geometry() const { return geom_; }
    const MaskStack& masks() const { return masks_; }
    int padded_nx() const { return depth_tf_[0].pnx; }
    int padded_ny() const { return depth_tf_[0].pny; }
    bool sensor_leg_identity() const { return sensor_identity_; }

    // Building blocks, exposed for the capture simulator which needs the
    // complex field before real-part extraction.
    // Sum_n P_h1(P_dn(obj[t][n])) on the padded grid, spatial domain.
    CVector object_field_at_mask(const Object4D& obj, int t, bool parallel_depths) const;
    // Multiply by frame t's mask, zero outside the sensor region.
    void apply_mask_padded(CVector& field, int t) const;
    // P_h2 (identity when mask_to_sensor == 0).
    void propagate_mask_to_sensor(CVector& field) const;

private:
    Geometry geom_;
    MaskStack masks_;
    std::vector<TransferFunction> depth_tf_; // P_h1 * P_dn combined, per depth
    TransferFunction sensor_tf_;             // P_h2; empty spectrum when identity
    bool sensor_identity_ = true;

    void frame_forward(const Object4D& obj, int t, RVector& g_t, bool parallel_depths) const;
    void frame_adjoint(const CVector& g2tau, Object4D& out, int t, bool parallel_depths) const;
};

Hologram forward(const Object4D& obj, const MaskStack& masks, const Geometry& geom);
Object4D adjoint(const Hologram& holo, const MaskStack& masks, const Geometry& geom);

/// raw - background, elementwise; the background capture approximates the
/// reference-only intensity, so the difference is the linearized signal.
Hologram subtract_background(const Hologram& raw, const Hologram& background);

/// Largest singular value of A by power iteration on A^T A. Deterministic
/// for a fixed seed and non-decreasing in the iteration count.
double operator_norm_estimate(const MaskStack& masks, const Geometry& geom, int iterations,
                              std::uint64_t seed = 0x5EED0C0DEULL);
double operator_norm_estimate(const SensingOperator& op, int iterations,
                              std::uint64_t seed = 0x5EED0C0DEULL);

// Real/complex inner products with the complex side read as R^2; these are
// the pairings the adjoint is exact for.
double dot(const RVector& a, const RVector& b);
double dot_real(const CVector& a, const CVector& b);

} // namespace chv

#endif

#ifndef CHV_PROPAGATION_HPP
#define CHV_PROPAGATION_HPP

#include "chv/field.hpp"

namespace chv {

/// Frequency-domain free-space propagator (angular spectrum) on a
/// zero-padded grid. Inside the propagating band every sample is pure
/// phase; evanescent components are zero; with band_limited the samples
/// beyond the anti-aliasing limit for |z| are zero as well.
///
/// transfer(z) and transfer(-z) are exact sample-wise conjugates, so the
/// adjoint of propagation by z is propagation by -z.
struct TransferFunction {
    int nx = 0, ny = 0;      // unpadded grid this TF was built for
    int pad_factor = 1;
    int pnx = 0, pny = 0;    // padded grid = pad_factor * (nx, ny)
    double pitch = 0.0;
    double wavelength = 0.0;
    double z = 0.0;          // signed propagation distance, meters
    bool band_limited = true;
    CVector spectrum;        // pny x pnx, FFT frequency order
};

TransferFunction make_transfer(int nx, int ny, double pitch, double wavelength, double z,
                               int pad_factor = 2, bool band_limited = true);

/// Propagates by tf.z: zero-pad (centered), FFT, multiply, inverse FFT,
/// crop back to nx x ny. Linear in the input field.
ComplexField propagate(const ComplexField& field, const TransferFunction& tf);

// Padded-buffer building blocks shared with the sensing operator.
void pad_embed(const cdouble* src, int ny, int nx, CVector& dst, int pny, int pnx);
void crop_center(const CVector& src, int pny, int pnx, cdouble* dst, int ny, int nx);
void pad_embed(const CVector& src, int ny, int nx, CVector& dst, int pny, int pnx);
void crop_center(const CVector& src, int pny, int pnx, CVector& dst, int ny, int nx);

} // namespace chv

#endif

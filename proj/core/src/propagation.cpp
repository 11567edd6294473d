#include "chv/propagation.hpp"

#include <cmath>
#include <cstring>

#include "chv/errors.hpp"
#include "chv/fft.hpp"

namespace chv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// FFT-order frequency for bin j of n samples at the given pitch.
inline double fft_freq(int j, int n, double pitch) {
    const int k = (j <= n / 2) ? j : j - n;
    return static_cast<double>(k) / (static_cast<double>(n) * pitch);
}

} // namespace

TransferFunction make_transfer(int nx, int ny, double pitch, double wavelength, double z,
                               int pad_factor, bool band_limited) {
    if (nx < 1 || ny < 1) throw InvalidArgument("make_transfer: grid must be at least 1x1");
    if (pad_factor < 1) throw InvalidArgument("make_transfer: pad_factor must be >= 1");
    if (!(pitch > 0.0) || !std::isfinite(pitch))
        throw InvalidArgument("make_transfer: pitch must be positive and finite");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw InvalidArgument("make_transfer: wavelength must be positive and finite");
    if (!std::isfinite(z)) throw InvalidArgument("make_transfer: z must be finite");

    TransferFunction tf;
    tf.nx = nx;
    tf.ny = ny;
    tf.pad_factor = pad_factor;
    tf.pnx = nx * pad_factor;
    tf.pny = ny * pad_factor;
    tf.pitch = pitch;
    tf.wavelength = wavelength;
    tf.z = z;
    tf.band_limited = band_limited;
    tf.spectrum.assign(static_cast<std::size_t>(tf.pnx) * tf.pny, cdouble{0.0, 0.0});

    const double inv_lambda2 = 1.0 / (wavelength * wavelength);
    const double az = std::abs(z);

    // Anti-aliasing limit: beyond it the sampled transfer-function phase
    // wraps faster than the padded grid can represent, which folds kernel
    // energy back into the frame.
    const double dfx = 1.0 / (static_cast<double>(tf.pnx) * pitch);
    const double dfy = 1.0 / (static_cast<double>(tf.pny) * pitch);
    const double fx_lim = 1.0 / (wavelength * std::sqrt(4.0 * dfx * dfx * az * az + 1.0));
    const double fy_lim = 1.0 / (wavelength * std::sqrt(4.0 * dfy * dfy * az * az + 1.0));

    for (int jy = 0; jy < tf.pny; ++jy) {
        const double fy = fft_freq(jy, tf.pny, pitch);
        cdouble* row = tf.spectrum.data() + static_cast<std::size_t>(jy) * tf.pnx;
        for (int jx = 0; jx < tf.pnx; ++jx) {
            const double fx = fft_freq(jx, tf.pnx, pitch);
            const double s2 = inv_lambda2 - fx * fx - fy * fy;
            if (s2 <= 0.0) continue; // evanescent: zeroed
            if (band_limited && (std::abs(fx) > fx_lim || std::abs(fy) > fy_lim)) continue;
            const double phase = kTwoPi * z * std::sqrt(s2);
            row[jx] = cdouble{std::cos(phase), std::sin(phase)};
        }
    }
    return tf;
}

void pad_embed(const cdouble* src, int ny, int nx, CVector& dst, int pny, int pnx) {
    dst.assign(static_cast<std::size_t>(pny) * pnx, cdouble{0.0, 0.0});
    const int oy = (pny - ny) / 2;
    const int ox = (pnx - nx) / 2;
    for (int iy = 0; iy < ny; ++iy) {
        std::memcpy(dst.data() + (static_cast<std::size_t>(iy + oy) * pnx + ox),
                    src + static_cast<std::size_t>(iy) * nx, sizeof(cdouble) * nx);
    }
}

void crop_center(const CVector& src, int pny, int pnx, cdouble* dst, int ny, int nx) {
    const int oy = (pny - ny) / 2;
    const int ox = (pnx - nx) / 2;
    for (int iy = 0; iy < ny; ++iy) {
        std::memcpy(dst + static_cast<std::size_t>(iy) * nx,
                    src.data() + (static_cast<std::size_t>(iy + oy) * pnx + ox),
                    sizeof(cdouble) * nx);
    }
}

void pad_embed(const CVector& src, int ny, int nx, CVector& dst, int pny, int pnx) {
    pad_embed(src.data(), ny, nx, dst, pny, pnx);
}

void crop_center(const CVector& src, int pny, int pnx, CVector& dst, int ny, int nx) {
    dst.resize(static_cast<std::size_t>(ny) * nx);
    crop_center(src, pny, pnx, dst.data(), ny, nx);
}

ComplexField propagate(const ComplexField& field, const TransferFunction& tf) {
    if (field.nx != tf.nx || field.ny != tf.ny)
        throw DimensionMismatch("propagate: field grid does not match transfer function");
    if (field.pitch != tf.pitch)
        throw DimensionMismatch("propagate: field pitch does not match transfer function");

    CVector buf;
    pad_embed(field.data, tf.ny, tf.nx, buf, tf.pny, tf.pnx);
    fft2_forward(buf, tf.pny, tf.pnx);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= tf.spectrum[i];
    fft2_inverse(buf, tf.pny, tf.pnx);

    ComplexField out(field.nx, field.ny, field.pitch);
    crop_center(buf, tf.pny, tf.pnx, out.data, tf.ny, tf.nx);
    return out;
}

} // namespace chv

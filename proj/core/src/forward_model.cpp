#include "chv/forward_model.hpp"

#include <algorithm>
#include <cmath>

#include "chv/errors.hpp"
#include "chv/fft.hpp"
#include "chv/parallel.hpp"
#include "chv/rng.hpp"

namespace chv {

void Geometry::validate() const {
    if (nx < 1 || ny < 1) throw InvalidArgument("Geometry: grid must be at least 1x1");
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw InvalidArgument("Geometry: bad pitch");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw InvalidArgument("Geometry: bad wavelength");
    if (depths.empty()) throw InvalidArgument("Geometry: at least one depth plane required");
    double prev = 0.0;
    for (double d : depths) {
        if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("Geometry: depths must be > 0");
        if (d <= prev) throw InvalidArgument("Geometry: depths must be strictly increasing");
        prev = d;
    }
    if (frame_count < 1) throw InvalidArgument("Geometry: frame_count must be >= 1");
    if (!(frame_interval > 0.0) || !std::isfinite(frame_interval))
        throw InvalidArgument("Geometry: frame_interval must be > 0");
    if (!std::isfinite(observation_to_mask) || !std::isfinite(mask_to_sensor))
        throw InvalidArgument("Geometry: non-finite distance");
    if (pad_factor < 1) throw InvalidArgument("Geometry: pad_factor must be >= 1");
}

Object4D::Object4D(int T_, int nd_, int ny_, int nx_) : T(T_), nd(nd_), ny(ny_), nx(nx_) {
    if (T < 1 || nd < 1 || ny < 1 || nx < 1) throw InvalidArgument("Object4D: bad shape");
    data.assign(static_cast<std::size_t>(T) * nd * ny * nx, cdouble{0.0, 0.0});
}

Object4D Object4D::like(const Geometry& g) {
    return Object4D(g.frame_count, g.depth_count(), g.ny, g.nx);
}

Hologram::Hologram(int nx_, int ny_, HologramKind kind_) : nx(nx_), ny(ny_), kind(kind_) {
    if (nx < 1 || ny < 1) throw InvalidArgument("Hologram: bad dims");
    data.assign(static_cast<std::size_t>(nx) * ny, 0.0);
}

const char* to_string(HologramKind k) {
    switch (k) {
        case HologramKind::raw: return "raw";
        case HologramKind::background: return "background";
        case HologramKind::subtracted: return "subtracted";
    }
    return "?";
}

SensingOperator::SensingOperator(const Geometry& geom, const MaskStack& masks)
    : geom_(geom), masks_(masks) {
    geom_.validate();
    if (masks_.frame_count() != geom_.frame_count)
        throw DimensionMismatch("SensingOperator: mask frame count != geometry frame count");
    if (masks_.nx != geom_.nx || masks_.ny != geom_.ny)
        throw DimensionMismatch("SensingOperator: mask grid != geometry grid");

    depth_tf_.reserve(geom_.depths.size());
    for (double d : geom_.depths) {
        // One spectrum per depth: the d_n leg and the z1-z0 leg are both
        // pure-phase multipliers, so they combine sample-wise.
        TransferFunction tf =
            make_transfer(geom_.nx, geom_.ny, geom_.pitch, geom_.wavelength, d, geom_.pad_factor);
        if (geom_.observation_to_mask != 0.0) {
            TransferFunction h1 = make_transfer(geom_.nx, geom_.ny, geom_.pitch, geom_.wavelength,
                                                geom_.observation_to_mask, geom_.pad_factor);
            for (std::size_t i = 0; i < tf.spectrum.size(); ++i) tf.spectrum[i] *= h1.spectrum[i];
            tf.z += h1.z;
        }
        depth_tf_.push_back(std::move(tf));
    }
    sensor_identity_ = geom_.mask_to_sensor == 0.0;
    if (!sensor_identity_)
        sensor_tf_ = make_transfer(geom_.nx, geom_.ny, geom_.pitch, geom_.wavelength,
                                   geom_.mask_to_sensor, geom_.pad_factor);
}

CVector SensingOperator::object_field_at_mask(const Object4D& obj, int t,
                                              bool parallel_depths) const {
    const int pnx = depth_tf_[0].pnx, pny = depth_tf_[0].pny;
    const std::size_t pn = static_cast<std::size_t>(pnx) * pny;
    const int nd = geom_.depth_count();

    CVector acc(pn, cdouble{0.0, 0.0});
    if (!parallel_depths || nd < 2) {
        CVector buf;
        for (int n = 0; n < nd; ++n) {
            pad_embed(obj.slice(t, n), obj.ny, obj.nx, buf, pny, pnx);
            fft2_forward(buf, pny, pnx);
            const CVector& tf = depth_tf_[static_cast<std::size_t>(n)].spectrum;
            for (std::size_t i = 0; i < pn; ++i) acc[i] += buf[i] * tf[i];
        }
    } else {
        // Fixed-size depth chunks with an ordered final reduction keep the
        // summation order independent of the thread count.
        const int chunk = 4;
        const int nchunks = (nd + chunk - 1) / chunk;
        std::vector<CVector> partial(static_cast<std::size_t>(nchunks));
        parallel_for(static_cast<std::size_t>(nchunks), [&](std::size_t c) {
            partial[c].assign(pn, cdouble{0.0, 0.0});
            CVector buf;
            const int n0 = static_cast<int>(c) * chunk;
            const int n1 = std::min(nd, n0 + chunk);
            for (int n = n0; n < n1; ++n) {
                pad_embed(obj.slice(t, n), obj.ny, obj.nx, buf, pny, pnx);
                fft2_forward(buf, pny, pnx);
                const CVector& tf = depth_tf_[static_cast<std::size_t>(n)].spectrum;
                for (std::size_t i = 0; i < pn; ++i) partial[c][i] += buf[i] * tf[i];
            }
        });
        for (int c = 0; c < nchunks; ++c)
            for (std::size_t i = 0; i < pn; ++i) acc[i] += partial[static_cast<std::size_t>(c)][i];
    }
    fft2_inverse(acc, pny, pnx); // field at the mask plane
    return acc;
}

void SensingOperator::apply_mask_padded(CVector& field, int t) const {
    const int pnx = depth_tf_[0].pnx, pny = depth_tf_[0].pny;
    const auto& m = masks_.frames[static_cast<std::size_t>(t)];
    const int oy = (pny - geom_.ny) / 2, ox = (pnx - geom_.nx) / 2;
    CVector masked(field.size(), cdouble{0.0, 0.0});
    for (int iy = 0; iy < geom_.ny; ++iy) {
        const std::size_t prow = static_cast<std::size_t>(iy + oy) * pnx + ox;
        const std::size_t mrow = static_cast<std::size_t>(iy) * geom_.nx;
        for (int ix = 0; ix < geom_.nx; ++ix)
            if (m[mrow + ix]) masked[prow + ix] = field[prow + ix];
    }
    field.swap(masked);
}

void SensingOperator::propagate_mask_to_sensor(CVector& field) const {
    if (sensor_identity_) return;
    const int pnx = depth_tf_[0].pnx, pny = depth_tf_[0].pny;
    fft2_forward(field, pny, pnx);
    for (std::size_t i = 0; i < field.size(); ++i) field[i] *= sensor_tf_.spectrum[i];
    fft2_inverse(field, pny, pnx);
}

void SensingOperator::frame_forward(const Object4D& obj, int t, RVector& g_t,
                                    bool parallel_depths) const {
    const int pnx = depth_tf_[0].pnx, pny = depth_tf_[0].pny;
    CVector field = object_field_at_mask(obj, t, parallel_depths);
    apply_mask_padded(field, t);
    propagate_mask_to_sensor(field);

    const int oy = (pny - geom_.ny) / 2, ox = (pnx - geom_.nx) / 2;
    g_t.assign(static_cast<std::size_t>(geom_.ny) * geom_.nx, 0.0);
    for (int iy = 0; iy < geom_.ny; ++iy) {
        const std::size_t prow = static_cast<std::size_t>(iy + oy) * pnx + ox;
        const std::size_t grow = static_cast<std::size_t>(iy) * geom_.nx;
        for (int ix = 0; ix < geom_.nx; ++ix)
            g_t[grow + ix] = 2.0 * field[prow + ix].real();
    }
}

Hologram SensingOperator::forward(const Object4D& obj) const {
    if (obj.T != geom_.frame_count || obj.nd != geom_.depth_count() || obj.ny != geom_.ny ||
        obj.nx != geom_.nx)
        throw DimensionMismatch("forward: object shape does not match geometry");

    const int T = geom_.frame_count;
    const bool depth_parallel = T < thread_budget();
    std::vector<RVector> partial(static_cast<std::size_t>(T));
    if (depth_parallel) {
        for (int t = 0; t < T; ++t)
            frame_forward(obj, t, partial[static_cast<std::size_t>(t)], true);
    } else {
        parallel_for(static_cast<std::size_t>(T),
                     [&](std::size_t t) { frame_forward(obj, static_cast<int>(t), partial[t], false); });
    }

    Hologram g(geom_.nx, geom_.ny, HologramKind::subtracted);
    for (int t = 0; t < T; ++t) // fixed order: bit-reproducible
        for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] += partial[static_cast<std::size_t>(t)][i];
    const double tau = geom_.frame_interval;
    for (auto& v : g.data) v *= tau;
    return g;
}

void SensingOperator::frame_adjoint(const CVector& g2tau, Object4D& out, int t,
                                    bool parallel_depths) const {
    const int pnx = depth_tf_[0].pnx, pny = depth_tf_[0].pny;
    const std::size_t pn = static_cast<std::size_t>(pnx) * pny;

    CVector buf;
    pad_embed(g2tau, geom_.ny, geom_.nx, buf, pny, pnx);

    if (!sensor_identity_) {
        fft2_forward(buf, pny, pnx);
        for (std::size_t i = 0; i < pn; ++i) buf[i] *= std::conj(sensor_tf_.spectrum[i]);
        fft2_inverse(buf, pny, pnx);
    }

    const auto& m = masks_.frames[static_cast<std::size_t>(t)];
    const int oy = (pny - geom_.ny) / 2, ox = (pnx - geom_.nx) / 2;
    CVector masked(pn, cdouble{0.0, 0.0});
    for (int iy = 0; iy < geom_.ny; ++iy) {
        const std::size_t prow = static_cast<std::size_t>(iy + oy) * pnx + ox;
        const std::size_t mrow = static_cast<std::size_t>(iy) * geom_.nx;
        for (int ix = 0; ix < geom_.nx; ++ix)
            if (m[mrow + ix]) masked[prow + ix] = buf[prow + ix];
    }

    fft2_forward(masked, pny, pnx);
    auto one_depth = [&](int n, CVector& spec) {
        const CVector& tf = depth_tf_[static_cast<std::size_t>(n)].spectrum;
        for (std::size_t i = 0; i < pn; ++i) spec[i] = masked[i] * std::conj(tf[i]);
        fft2_inverse(spec, pny, pnx);
        crop_center(spec, pny, pnx, out.slice(t, n), geom_.ny, geom_.nx);
    };
    if (parallel_depths && geom_.depth_count() > 1) {
        parallel_for(static_cast<std::size_t>(geom_.depth_count()), [&](std::size_t n) {
            CVector spec(pn);
            one_depth(static_cast<int>(n), spec);
        });
    } else {
        CVector spec(pn);
        for (int n = 0; n < geom_.depth_count(); ++n) one_depth(n, spec);
    }
}

Object4D SensingOperator::adjoint(const Hologram& holo) const {
    if (holo.nx != geom_.nx || holo.ny != geom_.ny)
        throw DimensionMismatch("adjoint: hologram grid does not match geometry");

    // Adjoint of (tau * 2 Re{.}) injects the measurement as a real field.
    CVector g2tau(holo.data.size());
    const double s = 2.0 * geom_.frame_interval;
    for (std::size_t i = 0; i < holo.data.size(); ++i) g2tau[i] = cdouble{s * holo.data[i], 0.0};

    Object4D out = Object4D::like(geom_);
    const int T = geom_.frame_count;
    if (T < thread_budget()) {
        for (int t = 0; t < T; ++t) frame_adjoint(g2tau, out, t, true);
    } else {
        parallel_for(static_cast<std::size_t>(T),
                     [&](std::size_t t) { frame_adjoint(g2tau, out, static_cast<int>(t), false); });
    }
    return out;
}

Hologram forward(const Object4D& obj, const MaskStack& masks, const Geometry& geom) {
    return SensingOperator(geom, masks).forward(obj);
}

Object4D adjoint(const Hologram& holo, const MaskStack& masks, const Geometry& geom) {
    return SensingOperator(geom, masks).adjoint(holo);
}

Hologram subtract_background(const Hologram& raw, const Hologram& background) {
    if (raw.nx != background.nx || raw.ny != background.ny)
        throw DimensionMismatch("subtract_background: dimension mismatch");
    if (raw.kind != HologramKind::raw || background.kind != HologramKind::background)
        throw DimensionMismatch("subtract_background: expected kinds raw and background");
    Hologram out(raw.nx, raw.ny, HologramKind::subtracted);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = raw.data[i] - background.data[i];
    return out;
}

double operator_norm_estimate(const MaskStack& masks, const Geometry& geom, int iterations,
                              std::uint64_t seed) {
    return operator_norm_estimate(SensingOperator(geom, masks), iterations, seed);
}

double operator_norm_estimate(const SensingOperator& op, int iterations, std::uint64_t seed) {
    if (iterations < 1) throw InvalidArgument("operator_norm_estimate: iterations must be >= 1");
    const Geometry& geom = op.geometry();

    Object4D v = Object4D::like(geom);
    Rng rng(derive_seed(seed, "power-iteration"));
    for (auto& z : v.data) z = cdouble{rng.next_double() - 0.5, rng.next_double() - 0.5};

    double sigma = 0.0;
    for (int k = 0; k < iterations; ++k) {
        const double nv = l2_norm(v.data);
        if (nv == 0.0) return 0.0;
        for (auto& z : v.data) z /= nv;
        Hologram av = op.forward(v);
        sigma = l2_norm(av.data); // Rayleigh estimate ||A v|| / ||v||, ||v|| = 1
        v = op.adjoint(av);
    }
    return sigma;
}

double dot(const RVector& a, const RVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double dot_real(const CVector& a, const CVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return s;
}

} // namespace chv

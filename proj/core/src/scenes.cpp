#include "chv/scenes.hpp"

#include <algorithm>
#include <cmath>

#include "chv/errors.hpp"
#include "chv/propagation.hpp"
#include "chv/rng.hpp"

namespace chv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Stamp {
    int icx = 0, icy = 0; // snapped center, pixels
    int half_w = 0, half_h = 0;
};

// Snap the frame-t center to the nearest pixel so rasterized centroids sit
// exactly on the grid.
Stamp stamp_box(const SceneObject& ob, int nx, int ny, int t, double tau, double pitch) {
    const double cx = ob.x0 + ob.vx * t * tau;
    const double cy = ob.y0 + ob.vy * t * tau;
    Stamp s;
    s.icx = nx / 2 + static_cast<int>(std::lround(cx / pitch));
    s.icy = ny / 2 + static_cast<int>(std::lround(cy / pitch));
    double reach_x, reach_y;
    if (ob.shape == ObjectShape::disk) {
        reach_x = reach_y = 0.5 * ob.size;
    } else {
        const double r = 0.5 * ob.length + 0.5 * ob.size + std::abs(ob.curve_amplitude);
        reach_x = reach_y = r;
    }
    s.half_w = static_cast<int>(std::ceil(reach_x / pitch));
    s.half_h = static_cast<int>(std::ceil(reach_y / pitch));
    return s;
}

void rasterize(const SceneObject& ob, const Stamp& s, double pitch, int nx, int ny,
               cdouble* slice) {
    const double ca = std::cos(ob.angle), sa = std::sin(ob.angle);
    for (int iy = s.icy - s.half_h; iy <= s.icy + s.half_h; ++iy) {
        for (int ix = s.icx - s.half_w; ix <= s.icx + s.half_w; ++ix) {
            const double dx = (ix - s.icx) * pitch;
            const double dy = (iy - s.icy) * pitch;
            bool inside = false;
            switch (ob.shape) {
                case ObjectShape::disk:
                    inside = dx * dx + dy * dy <= 0.25 * ob.size * ob.size;
                    break;
                case ObjectShape::bar: {
                    const double along = ca * dx + sa * dy;
                    const double across = -sa * dx + ca * dy;
                    inside = std::abs(along) <= 0.5 * ob.length &&
                             std::abs(across) <= 0.5 * ob.size;
                    break;
                }
                case ObjectShape::fiber: {
                    const double along = ca * dx + sa * dy;
                    const double across = -sa * dx + ca * dy;
                    if (std::abs(along) <= 0.5 * ob.length) {
                        const double u = along / ob.length + 0.5; // 0..1
                        const double spine =
                            ob.curve_amplitude * std::sin(kTwoPi * ob.curve_cycles * u);
                        inside = std::abs(across - spine) <= 0.5 * ob.size;
                    }
                    break;
                }
            }
            if (inside)
                slice[static_cast<std::size_t>(iy) * nx + ix] += cdouble{ob.amplitude, 0.0};
        }
    }
}

} // namespace

void SceneSpec::validate() const {
    if (nx < 1 || ny < 1) throw InvalidArgument("SceneSpec: bad grid");
    if (!(pitch > 0.0)) throw InvalidArgument("SceneSpec: bad pitch");
    if (depths.empty()) throw InvalidArgument("SceneSpec: no depth planes");
    if (frame_count < 1) throw InvalidArgument("SceneSpec: frame_count must be >= 1");
    if (!(frame_interval > 0.0)) throw InvalidArgument("SceneSpec: frame_interval must be > 0");
    for (const auto& ob : objects) {
        if (!(ob.amplitude > 0.0) || ob.amplitude > 1.0)
            throw InvalidArgument("SceneSpec: object amplitude must be in (0, 1]");
        if (ob.depth_index < 0 || ob.depth_index >= static_cast<int>(depths.size()))
            throw InvalidArgument("SceneSpec: object depth_index out of range");
        if (ob.size < 0.0 || ob.length < 0.0)
            throw InvalidArgument("SceneSpec: negative object size");
    }
}

Object4D build_scene(const SceneSpec& spec) {
    spec.validate();
    Object4D obj(spec.frame_count, static_cast<int>(spec.depths.size()), spec.ny, spec.nx);
    for (int t = 0; t < spec.frame_count; ++t) {
        for (const auto& ob : spec.objects) {
            const Stamp s = stamp_box(ob, spec.nx, spec.ny, t, spec.frame_interval, spec.pitch);
            if (s.icx - s.half_w < 0 || s.icx + s.half_w >= spec.nx || s.icy - s.half_h < 0 ||
                s.icy + s.half_h >= spec.ny)
                throw InvalidArgument("build_scene: object out of bounds at frame " +
                                      std::to_string(t));
            rasterize(ob, s, spec.pitch, spec.nx, spec.ny, obj.slice(t, ob.depth_index));
        }
    }
    return obj;
}

std::pair<Hologram, Hologram> simulate_capture(const Object4D& obj, const MaskStack& masks,
                                               const Geometry& geom, const NoiseSpec& noise) {
    SensingOperator op(geom, masks);
    if (obj.T != geom.frame_count || obj.nd != geom.depth_count() || obj.ny != geom.ny ||
        obj.nx != geom.nx)
        throw DimensionMismatch("simulate_capture: object shape does not match geometry");
    if (noise.sigma < 0.0) throw InvalidArgument("simulate_capture: sigma must be >= 0");

    const int pnx = op.padded_nx(), pny = op.padded_ny();
    const std::size_t pn = static_cast<std::size_t>(pnx) * pny;
    const int oy = (pny - geom.ny) / 2, ox = (pnx - geom.nx) / 2;
    const double tau = geom.frame_interval;

    Hologram raw(geom.nx, geom.ny, HologramKind::raw);
    Hologram background(geom.nx, geom.ny, HologramKind::background);

    for (int t = 0; t < geom.frame_count; ++t) {
        // Object and reference both traverse mask and sensor legs; the
        // reference enters the mask plane as a unit-amplitude plane wave.
        CVector field = op.object_field_at_mask(obj, t, true);
        for (auto& z : field) z += 1.0;
        op.apply_mask_padded(field, t);
        op.propagate_mask_to_sensor(field);

        CVector ref(pn, cdouble{1.0, 0.0});
        op.apply_mask_padded(ref, t);
        op.propagate_mask_to_sensor(ref);

        for (int iy = 0; iy < geom.ny; ++iy) {
            const std::size_t prow = static_cast<std::size_t>(iy + oy) * pnx + ox;
            const std::size_t grow = static_cast<std::size_t>(iy) * geom.nx;
            for (int ix = 0; ix < geom.nx; ++ix) {
                raw.data[grow + ix] += tau * std::norm(field[prow + ix]);
                background.data[grow + ix] += tau * std::norm(ref[prow + ix]);
            }
        }
    }

    if (noise.model == NoiseSpec::Model::gaussian && noise.sigma > 0.0) {
        double mean_bg = 0.0;
        for (double v : background.data) mean_bg += v;
        mean_bg /= static_cast<double>(background.data.size());
        const double sigma_abs = noise.sigma * mean_bg;

        Rng rng_raw(derive_seed(noise.seed, "capture-noise-raw"));
        Rng rng_bg(derive_seed(noise.seed, "capture-noise-background"));
        for (auto& v : raw.data) v = std::max(0.0, v + sigma_abs * rng_raw.next_gaussian());
        for (auto& v : background.data)
            v = std::max(0.0, v + sigma_abs * rng_bg.next_gaussian());
    }
    return {std::move(raw), std::move(background)};
}

double psnr(const Object4D& recon, const Object4D& truth) {
    if (!recon.same_shape(truth)) throw DimensionMismatch("psnr: shape mismatch");
    double peak = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double tv = std::abs(truth.data[i]);
        peak = std::max(peak, tv);
        const double d = std::abs(recon.data[i]) - tv;
        mse += d * d;
    }
    mse /= static_cast<double>(truth.size());
    if (mse == 0.0) return 300.0;
    if (peak == 0.0) return -300.0;
    return 10.0 * std::log10(peak * peak / mse);
}

double fit_scale(const Object4D& recon, const Object4D& truth) {
    if (!recon.same_shape(truth)) throw DimensionMismatch("fit_scale: shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double r = std::abs(recon.data[i]);
        num += r * std::abs(truth.data[i]);
        den += r * r;
    }
    return den > 0.0 ? num / den : 1.0;
}

SceneSpec preset_two_plane(int nx, int ny, double pitch, const std::vector<double>& depths,
                           int frame_count, double frame_interval) {
    if (depths.empty()) throw InvalidArgument("preset_two_plane: depths required");
    SceneSpec spec;
    spec.kind = SceneKind::two_plane;
    spec.nx = nx;
    spec.ny = ny;
    spec.pitch = pitch;
    spec.depths = depths;
    spec.frame_count = frame_count;
    spec.frame_interval = frame_interval;
    const int far_plane = static_cast<int>(depths.size()) - 1;
    const double ext = nx * pitch;

    SceneObject big_fiber;
    big_fiber.shape = ObjectShape::fiber;
    big_fiber.depth_index = 0;
    big_fiber.amplitude = 0.08;
    big_fiber.x0 = -0.12 * ext;
    big_fiber.y0 = -0.05 * ext;
    big_fiber.size = 3.0 * pitch;
    big_fiber.length = 0.52 * ext;
    big_fiber.angle = 1.35;
    big_fiber.curve_amplitude = 0.045 * ext;
    big_fiber.curve_cycles = 1.5;
    spec.objects.push_back(big_fiber);

    SceneObject dot;
    dot.shape = ObjectShape::disk;
    dot.depth_index = 0;
    dot.amplitude = 0.08;
    dot.x0 = 0.22 * ext;
    dot.y0 = -0.18 * ext;
    dot.size = 7.0 * pitch;
    spec.objects.push_back(dot);

    SceneObject small_fiber;
    small_fiber.shape = ObjectShape::fiber;
    small_fiber.depth_index = far_plane;
    small_fiber.amplitude = 0.08;
    small_fiber.x0 = 0.14 * ext;
    small_fiber.y0 = 0.16 * ext;
    small_fiber.size = 2.0 * pitch;
    small_fiber.length = 0.3 * ext;
    small_fiber.angle = -0.5;
    small_fiber.curve_amplitude = 0.02 * ext;
    small_fiber.curve_cycles = 1.0;
    spec.objects.push_back(small_fiber);

    SceneObject bar;
    bar.shape = ObjectShape::bar;
    bar.depth_index = far_plane;
    bar.amplitude = 0.08;
    bar.x0 = -0.2 * ext;
    bar.y0 = 0.24 * ext;
    bar.size = 3.0 * pitch;
    bar.length = 14.0 * pitch;
    bar.angle = 0.6;
    spec.objects.push_back(bar);
    return spec;
}

SceneSpec preset_fibers(int nx, int ny, double pitch, const std::vector<double>& depths,
                        int plane_a, int plane_b, int frame_count, double frame_interval) {
    SceneSpec spec;
    spec.kind = SceneKind::static_fibers;
    spec.nx = nx;
    spec.ny = ny;
    spec.pitch = pitch;
    spec.depths = depths;
    spec.frame_count = frame_count;
    spec.frame_interval = frame_interval;
    const double ext = nx * pitch;

    SceneObject fiber_a;
    fiber_a.shape = ObjectShape::fiber;
    fiber_a.depth_index = plane_a;
    fiber_a.amplitude = 0.09;
    fiber_a.x0 = -0.12 * ext;
    fiber_a.y0 = 0.0;
    fiber_a.size = 2.5 * pitch;
    fiber_a.length = 0.55 * ny * pitch;
    fiber_a.angle = 1.45; // near vertical
    fiber_a.curve_amplitude = 0.03 * ext;
    fiber_a.curve_cycles = 1.2;
    spec.objects.push_back(fiber_a);

    SceneObject fiber_b;
    fiber_b.shape = ObjectShape::fiber;
    fiber_b.depth_index = plane_b;
    fiber_b.amplitude = 0.09;
    fiber_b.x0 = 0.14 * ext;
    fiber_b.y0 = 0.12 * ext;
    fiber_b.size = 2.0 * pitch;
    fiber_b.length = 0.42 * ext;
    fiber_b.angle = -0.25; // near horizontal
    fiber_b.curve_amplitude = 0.02 * ext;
    fiber_b.curve_cycles = 1.0;
    spec.objects.push_back(fiber_b);
    return spec;
}

SceneSpec preset_particles(int nx, int ny, double pitch, const std::vector<double>& depths,
                           int count, int frame_count, double frame_interval) {
    if (depths.size() < 2)
        throw InvalidArgument("preset_particles: two depth planes required");
    if (count < 1 || count > 7)
        throw InvalidArgument("preset_particles: count must be in 1..7");

    // Layout in 160-grid units: start pixel, integer pixels-per-frame
    // velocity, depth plane. Trajectories stay separated by > 15 px over
    // ten frames, so nearest-neighbor association is unambiguous.
    struct Slot {
        double fx, fy;
        int kx, ky;
        int plane;
    };
    static const Slot slots[7] = {
        {30.0 / 160, 30.0 / 160, 2, 0, 0},   {130.0 / 160, 40.0 / 160, 0, -2, 1},
        {40.0 / 160, 60.0 / 160, 2, 2, 0},   {120.0 / 160, 112.0 / 160, -3, 1, 1},
        {80.0 / 160, 100.0 / 160, 3, -3, 0}, {20.0 / 160, 80.0 / 160, 4, 2, 1},
        {20.0 / 160, 138.0 / 160, 12, 1, 0},
    };

    SceneSpec spec;
    spec.kind = SceneKind::moving_particles;
    spec.nx = nx;
    spec.ny = ny;
    spec.pitch = pitch;
    spec.depths = depths;
    spec.frame_count = frame_count;
    spec.frame_interval = frame_interval;
    const int last_plane = static_cast<int>(depths.size()) - 1;
    for (int i = 0; i < count; ++i) {
        const Slot& s = slots[i];
        SceneObject ob;
        ob.shape = ObjectShape::disk;
        ob.depth_index = s.plane == 0 ? 0 : last_plane;
        ob.amplitude = 0.1;
        ob.x0 = (std::lround(s.fx * nx) - nx / 2) * pitch;
        ob.y0 = (std::lround(s.fy * ny) - ny / 2) * pitch;
        ob.vx = s.kx * pitch / frame_interval;
        ob.vy = s.ky * pitch / frame_interval;
        ob.size = 3.0 * pitch;
        spec.objects.push_back(ob);
    }
    return spec;
}

double psnr_fitted(const Object4D& recon, const Object4D& truth) {
    const double a = fit_scale(recon, truth);
    double peak = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double tv = std::abs(truth.data[i]);
        peak = std::max(peak, tv);
        const double d = a * std::abs(recon.data[i]) - tv;
        mse += d * d;
    }
    mse /= static_cast<double>(truth.size());
    if (mse == 0.0) return 300.0;
    if (peak == 0.0) return -300.0;
    return 10.0 * std::log10(peak * peak / mse);
}

} // namespace chv

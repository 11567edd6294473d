#include <cmath>
#include <cstddef>
#include <vector>

#include "chv/errors.hpp"
#include "chv/parallel.hpp"
#include "chv/solver.hpp"

namespace chv {

namespace {

// One difference axis of the 4D lattice.
struct Axis {
    double w = 0.0;         // weight inside the isotropic magnitude
    std::size_t stride = 0;
    int extent = 0;
    int coord = 0;          // 0..3 for (x, y, z, t)
};

// Active axes for a given shape and config. Spatial/depth axes carry
// weight 1 relative to lambda_spatial; the temporal axis carries
// lambda_temporal / lambda_spatial. When lambda_spatial is zero the TV is
// purely temporal with weight 1 relative to lambda_temporal.
std::vector<Axis> active_axes(const Object4D& o, const SolverConfig& cfg) {
    const double ls = cfg.lambda_spatial, lt = cfg.lambda_temporal;
    double ws, wt;
    if (ls > 0.0) {
        ws = 1.0;
        wt = lt / ls;
    } else {
        ws = 0.0;
        wt = lt > 0.0 ? 1.0 : 0.0;
    }
    const std::size_t sx = 1;
    const std::size_t sy = static_cast<std::size_t>(o.nx);
    const std::size_t sz = sy * o.ny;
    const std::size_t st = sz * o.nd;
    std::vector<Axis> axes;
    if (ws > 0.0 && o.nx > 1) axes.push_back({ws, sx, o.nx, 0});
    if (ws > 0.0 && o.ny > 1) axes.push_back({ws, sy, o.ny, 1});
    if (ws > 0.0 && o.nd > 1) axes.push_back({ws, sz, o.nd, 2});
    if (wt > 0.0 && o.T > 1) axes.push_back({wt, st, o.T, 3});
    return axes;
}

// Applies fn(v, coords) to every voxel; coords = {x, y, z, t}.
template <typename Fn>
inline void for_each_voxel(const Object4D& shape, Fn&& fn) {
    std::size_t v = 0;
    int c[4];
    for (int t = 0; t < shape.T; ++t) {
        c[3] = t;
        for (int z = 0; z < shape.nd; ++z) {
            c[2] = z;
            for (int y = 0; y < shape.ny; ++y) {
                c[1] = y;
                for (int x = 0; x < shape.nx; ++x, ++v) {
                    c[0] = x;
                    fn(v, c);
                }
            }
        }
    }
}

double tv_channel(const std::vector<double>& u, const Object4D& shape,
                  const std::vector<Axis>& axes) {
    double total = 0.0;
    for_each_voxel(shape, [&](std::size_t v, const int c[4]) {
        double s = 0.0;
        for (const Axis& a : axes) {
            if (c[a.coord] + 1 >= a.extent) continue;
            const double d = a.w * (u[v + a.stride] - u[v]);
            s += d * d;
        }
        total += std::sqrt(s);
    });
    return total;
}

// Chambolle-type dual projection for min_u 1/2||u-f||^2 + c*TV_w(u).
void denoise_channel(std::vector<double>& f, const Object4D& shape,
                     const std::vector<Axis>& axes, double w, int iters) {
    const std::size_t n = f.size();
    const std::size_t nd = axes.size();
    std::vector<std::vector<double>> p(nd, std::vector<double>(n, 0.0));
    std::vector<double> s(n);

    double wsum = 0.0;
    for (const Axis& a : axes) wsum += a.w * a.w;
    const double tau = 1.0 / (4.0 * wsum);

    auto divergence = [&](std::size_t v, const int c[4]) {
        double d = 0.0;
        for (std::size_t a = 0; a < nd; ++a) {
            const Axis& ax = axes[a];
            const int cc = c[ax.coord];
            if (cc + 1 < ax.extent) d += ax.w * p[a][v];
            if (cc > 0) d -= ax.w * p[a][v - ax.stride];
        }
        return d;
    };

    double q[4];
    for (int it = 0; it < iters; ++it) {
        for_each_voxel(shape, [&](std::size_t v, const int c[4]) {
            s[v] = divergence(v, c) - f[v] / w;
        });
        for_each_voxel(shape, [&](std::size_t v, const int c[4]) {
            double mag2 = 0.0;
            for (std::size_t a = 0; a < nd; ++a) {
                const Axis& ax = axes[a];
                q[a] = (c[ax.coord] + 1 < ax.extent) ? ax.w * (s[v + ax.stride] - s[v]) : 0.0;
                mag2 += q[a] * q[a];
            }
            const double denom = 1.0 + tau * std::sqrt(mag2);
            for (std::size_t a = 0; a < nd; ++a) p[a][v] = (p[a][v] + tau * q[a]) / denom;
        });
    }

    for_each_voxel(shape, [&](std::size_t v, const int c[4]) {
        f[v] -= w * divergence(v, c);
    });
}

} // namespace

double tv_norm(const Object4D& obj, const SolverConfig& cfg) {
    const auto axes = active_axes(obj, cfg);
    if (axes.empty()) return 0.0;

    std::vector<double> re(obj.size()), im(obj.size());
    for (std::size_t i = 0; i < obj.size(); ++i) {
        re[i] = obj.data[i].real();
        im[i] = obj.data[i].imag();
    }
    double out[2];
    parallel_for(2, [&](std::size_t ch) {
        out[ch] = tv_channel(ch == 0 ? re : im, obj, axes);
    });
    return out[0] + out[1];
}

Object4D tv_denoise(const Object4D& obj, double weight, const SolverConfig& cfg) {
    if (weight < 0.0) throw InvalidArgument("tv_denoise: weight must be >= 0");
    if (cfg.tv_inner_iters < 1) throw InvalidArgument("tv_denoise: tv_inner_iters must be >= 1");
    Object4D out = obj;
    if (weight == 0.0) return out;
    const auto axes = active_axes(obj, cfg);
    if (axes.empty()) return out;

    std::vector<double> re(obj.size()), im(obj.size());
    for (std::size_t i = 0; i < obj.size(); ++i) {
        re[i] = obj.data[i].real();
        im[i] = obj.data[i].imag();
    }
    parallel_for(2, [&](std::size_t ch) {
        denoise_channel(ch == 0 ? re : im, obj, axes, weight, cfg.tv_inner_iters);
    });
    for (std::size_t i = 0; i < obj.size(); ++i) out.data[i] = cdouble{re[i], im[i]};
    return out;
}

} // namespace chv

#include "chv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chv/csv.hpp"
#include "chv/errors.hpp"
#include "chv/parallel.hpp"

namespace chv {

namespace {

// Pixels whose variance peak falls below this fraction of the frame-wide
// maximum are background; their normalized profiles are pure noise.
constexpr double kPeakFloorFraction = 0.01;

void check_window(int window, int ny, int nx) {
    if (window < 3 || window % 2 == 0 || window > std::min(nx, ny))
        throw InvalidArgument("block variance: window must be odd, >= 3 and fit the grid");
}

double clamped_window_variance(const RVector& absval, int ny, int nx, int px, int py,
                               int half) {
    const int x0 = std::max(0, px - half), x1 = std::min(nx - 1, px + half);
    const int y0 = std::max(0, py - half), y1 = std::min(ny - 1, py + half);
    const double count = static_cast<double>((x1 - x0 + 1) * (y1 - y0 + 1));
    double s1 = 0.0, s2 = 0.0;
    for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix) {
            const double v = absval[static_cast<std::size_t>(iy) * nx + ix];
            s1 += v;
            s2 += v * v;
        }
    const double mean = s1 / count;
    return std::max(0.0, s2 / count - mean * mean);
}

RVector abs_slice(const Object4D& vol, int t, int n) {
    RVector a(static_cast<std::size_t>(vol.ny) * vol.nx);
    const cdouble* s = vol.slice(t, n);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(s[i]);
    return a;
}

// Pearson correlation of two short profiles; constant profiles correlate 1
// with each other and 0 with anything varying.
double profile_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 && sbb == 0.0) return 1.0;
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

struct KeptPixel {
    int ix = 0, iy = 0;
    std::vector<double> profile; // normalized
    double peak = 0.0;           // unnormalized peak variance
};

int find_root(std::vector<int>& parent, int i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
        parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        i = parent[static_cast<std::size_t>(i)];
    }
    return i;
}

} // namespace

RVector block_variance_map(const RVector& slice, int ny, int nx, int window) {
    check_window(window, ny, nx);
    if (slice.size() != static_cast<std::size_t>(ny) * nx)
        throw DimensionMismatch("block_variance_map: slice size mismatch");

    RVector a(slice.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(slice[i]);
    // Shift by the global mean: variance is shift-invariant and the summed
    // squares stay well-conditioned.
    double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    for (auto& v : a) v -= mean;

    // Integral images over value and value^2.
    const int W = nx + 1;
    std::vector<double> i1(static_cast<std::size_t>(ny + 1) * W, 0.0);
    std::vector<double> i2(static_cast<std::size_t>(ny + 1) * W, 0.0);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double v = a[static_cast<std::size_t>(iy) * nx + ix];
            const std::size_t c = static_cast<std::size_t>(iy + 1) * W + ix + 1;
            i1[c] = v + i1[c - 1] + i1[c - W] - i1[c - W - 1];
            i2[c] = v * v + i2[c - 1] + i2[c - W] - i2[c - W - 1];
        }

    const int half = window / 2;
    RVector out(slice.size());
    for (int py = 0; py < ny; ++py) {
        const int y0 = std::max(0, py - half), y1 = std::min(ny - 1, py + half);
        for (int px = 0; px < nx; ++px) {
            const int x0 = std::max(0, px - half), x1 = std::min(nx - 1, px + half);
            const double count = static_cast<double>((x1 - x0 + 1) * (y1 - y0 + 1));
            auto rect = [&](const std::vector<double>& ii) {
                return ii[static_cast<std::size_t>(y1 + 1) * W + x1 + 1] -
                       ii[static_cast<std::size_t>(y0) * W + x1 + 1] -
                       ii[static_cast<std::size_t>(y1 + 1) * W + x0] +
                       ii[static_cast<std::size_t>(y0) * W + x0];
            };
            const double s1 = rect(i1), s2 = rect(i2);
            const double m = s1 / count;
            out[static_cast<std::size_t>(py) * nx + px] = std::max(0.0, s2 / count - m * m);
        }
    }
    return out;
}

FocusProfile focus_profile(const Object4D& vol, int frame, int px, int py, int window,
                           const Geometry& geom) {
    check_window(window, vol.ny, vol.nx);
    if (frame < 0 || frame >= vol.T) throw InvalidArgument("focus_profile: frame out of range");
    if (px < 0 || px >= vol.nx || py < 0 || py >= vol.ny)
        throw InvalidArgument("focus_profile: pixel outside grid");
    if (geom.depth_count() != vol.nd)
        throw DimensionMismatch("focus_profile: geometry depth count != volume");

    FocusProfile fp;
    fp.window = window;
    fp.depths = geom.depths;
    fp.variance.resize(static_cast<std::size_t>(vol.nd));
    const int half = window / 2;
    for (int n = 0; n < vol.nd; ++n) {
        RVector a = abs_slice(vol, frame, n);
        fp.variance[static_cast<std::size_t>(n)] =
            clamped_window_variance(a, vol.ny, vol.nx, px, py, half);
    }
    const double vmax = *std::max_element(fp.variance.begin(), fp.variance.end());
    if (vmax <= 0.0) {
        std::fill(fp.variance.begin(), fp.variance.end(), 0.0);
        fp.has_focus = false;
        fp.peak_index = -1;
        return fp;
    }
    for (auto& v : fp.variance) v /= vmax;
    fp.has_focus = true;
    fp.peak_index = static_cast<int>(
        std::max_element(fp.variance.begin(), fp.variance.end()) - fp.variance.begin());
    return fp;
}

std::vector<std::vector<Detection>> detect_particles(const Object4D& vol, int window,
                                                     double reject_threshold,
                                                     const Geometry& geom) {
    check_window(window, vol.ny, vol.nx);
    if (!(reject_threshold > 0.0 && reject_threshold < 1.0))
        throw InvalidArgument("detect_particles: reject_threshold must be in (0, 1)");
    if (geom.depth_count() != vol.nd)
        throw DimensionMismatch("detect_particles: geometry depth count != volume");

    const int nd = vol.nd, nx = vol.nx, ny = vol.ny;
    const std::size_t npix = static_cast<std::size_t>(nx) * ny;
    std::vector<std::vector<Detection>> result(static_cast<std::size_t>(vol.T));

    for (int t = 0; t < vol.T; ++t) {
        std::vector<RVector> vmap(static_cast<std::size_t>(nd));
        parallel_for(static_cast<std::size_t>(nd), [&](std::size_t n) {
            vmap[n] = block_variance_map(abs_slice(vol, t, static_cast<int>(n)), ny, nx, window);
        });

        double global_max = 0.0;
        for (const auto& m : vmap)
            for (double v : m) global_max = std::max(global_max, v);
        if (global_max <= 0.0) continue;
        const double floor = kPeakFloorFraction * global_max;

        // Keep pixels whose profile has a dominant peak: everything more
        // than one plane away from the peak stays below the threshold.
        std::vector<int> kept_index(npix, -1);
        std::vector<KeptPixel> kept;
        std::vector<double> prof(static_cast<std::size_t>(nd));
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const std::size_t pix = static_cast<std::size_t>(iy) * nx + ix;
                double pmax = 0.0;
                int peak = 0;
                for (int n = 0; n < nd; ++n) {
                    prof[static_cast<std::size_t>(n)] = vmap[static_cast<std::size_t>(n)][pix];
                    if (prof[static_cast<std::size_t>(n)] > pmax) {
                        pmax = prof[static_cast<std::size_t>(n)];
                        peak = n;
                    }
                }
                if (pmax < floor) continue;
                bool dominant = true;
                for (int n = 0; n < nd && dominant; ++n) {
                    if (std::abs(n - peak) <= 1) continue;
                    if (prof[static_cast<std::size_t>(n)] / pmax >= reject_threshold)
                        dominant = false;
                }
                if (!dominant) continue;
                KeptPixel kp;
                kp.ix = ix;
                kp.iy = iy;
                kp.peak = pmax;
                kp.profile.resize(static_cast<std::size_t>(nd));
                for (int n = 0; n < nd; ++n)
                    kp.profile[static_cast<std::size_t>(n)] =
                        prof[static_cast<std::size_t>(n)] / pmax;
                kept_index[pix] = static_cast<int>(kept.size());
                kept.push_back(std::move(kp));
            }
        if (kept.empty()) continue;

        // Merge 4-adjacent kept pixels with similar variance profiles.
        std::vector<int> parent(kept.size());
        std::iota(parent.begin(), parent.end(), 0);
        for (const auto& kp : kept) {
            const int i = kept_index[static_cast<std::size_t>(kp.iy) * nx + kp.ix];
            const int neighbors[2][2] = {{kp.ix + 1, kp.iy}, {kp.ix, kp.iy + 1}};
            for (const auto& nb : neighbors) {
                if (nb[0] >= nx || nb[1] >= ny) continue;
                const int j = kept_index[static_cast<std::size_t>(nb[1]) * nx + nb[0]];
                if (j < 0) continue;
                if (profile_correlation(kept[static_cast<std::size_t>(i)].profile,
                                        kept[static_cast<std::size_t>(j)].profile) >= 0.9) {
                    const int ri = find_root(parent, i), rj = find_root(parent, j);
                    if (ri != rj) parent[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
                }
            }
        }

        // One detection per component: variance-weighted centroid, focused
        // depth from the summed member profiles.
        std::vector<int> roots;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (find_root(parent, static_cast<int>(i)) == static_cast<int>(i))
                roots.push_back(static_cast<int>(i));
        for (int root : roots) {
            double wsum = 0.0, xsum = 0.0, ysum = 0.0, peak = 0.0;
            std::vector<double> depth_score(static_cast<std::size_t>(nd), 0.0);
            int count = 0;
            for (std::size_t i = 0; i < kept.size(); ++i) {
                if (find_root(parent, static_cast<int>(i)) != root) continue;
                const auto& kp = kept[i];
                wsum += kp.peak;
                xsum += kp.peak * kp.ix;
                ysum += kp.peak * kp.iy;
                peak = std::max(peak, kp.peak);
                for (int n = 0; n < nd; ++n)
                    depth_score[static_cast<std::size_t>(n)] +=
                        kp.peak * kp.profile[static_cast<std::size_t>(n)];
                ++count;
            }
            Detection d;
            d.frame = t;
            d.pixel_count = count;
            d.peak_variance = peak;
            d.depth_index = static_cast<int>(
                std::max_element(depth_score.begin(), depth_score.end()) - depth_score.begin());
            d.z = geom.depths[static_cast<std::size_t>(d.depth_index)];
            d.x = (xsum / wsum - nx / 2) * geom.pitch;
            d.y = (ysum / wsum - ny / 2) * geom.pitch;
            result[static_cast<std::size_t>(t)].push_back(d);
        }
    }
    return result;
}

std::vector<Track> track_particles(const std::vector<std::vector<Detection>>& detections,
                                   double max_jump) {
    if (!(max_jump > 0.0)) throw InvalidArgument("track_particles: max_jump must be > 0");
    const int T = static_cast<int>(detections.size());
    std::vector<Track> tracks;

    auto new_track = [&](const Detection& d) {
        Track tr;
        tr.id = static_cast<int>(tracks.size());
        tr.present.assign(static_cast<std::size_t>(T), false);
        tr.x.assign(static_cast<std::size_t>(T), 0.0);
        tr.y.assign(static_cast<std::size_t>(T), 0.0);
        tr.z.assign(static_cast<std::size_t>(T), 0.0);
        tr.present[static_cast<std::size_t>(d.frame)] = true;
        tr.x[static_cast<std::size_t>(d.frame)] = d.x;
        tr.y[static_cast<std::size_t>(d.frame)] = d.y;
        tr.z[static_cast<std::size_t>(d.frame)] = d.z;
        tracks.push_back(std::move(tr));
        return static_cast<int>(tracks.size()) - 1;
    };

    std::vector<int> active; // track indices whose last detection is frame f-1
    for (int f = 0; f < T; ++f) {
        const auto& dets = detections[static_cast<std::size_t>(f)];
        std::vector<int> matched_track(dets.size(), -1);
        if (f > 0 && !active.empty() && !dets.empty()) {
            struct Link {
                double dist;
                int track_pos; // position in active
                int det;
            };
            std::vector<Link> links;
            for (int a = 0; a < static_cast<int>(active.size()); ++a) {
                const Track& tr = tracks[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
                const std::size_t pf = static_cast<std::size_t>(f - 1);
                for (int d = 0; d < static_cast<int>(dets.size()); ++d) {
                    const double dx = dets[static_cast<std::size_t>(d)].x - tr.x[pf];
                    const double dy = dets[static_cast<std::size_t>(d)].y - tr.y[pf];
                    const double dz = dets[static_cast<std::size_t>(d)].z - tr.z[pf];
                    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                    if (dist <= max_jump) links.push_back({dist, a, d});
                }
            }
            std::sort(links.begin(), links.end(), [](const Link& u, const Link& v) {
                if (u.dist != v.dist) return u.dist < v.dist;
                if (u.track_pos != v.track_pos) return u.track_pos < v.track_pos;
                return u.det < v.det;
            });
            std::vector<bool> track_used(active.size(), false), det_used(dets.size(), false);
            for (const Link& l : links) {
                if (track_used[static_cast<std::size_t>(l.track_pos)] ||
                    det_used[static_cast<std::size_t>(l.det)])
                    continue;
                track_used[static_cast<std::size_t>(l.track_pos)] = true;
                det_used[static_cast<std::size_t>(l.det)] = true;
                matched_track[static_cast<std::size_t>(l.det)] =
                    active[static_cast<std::size_t>(l.track_pos)];
            }
        }

        std::vector<int> next_active;
        for (int d = 0; d < static_cast<int>(dets.size()); ++d) {
            int ti = matched_track[static_cast<std::size_t>(d)];
            if (ti >= 0) {
                Track& tr = tracks[static_cast<std::size_t>(ti)];
                tr.present[static_cast<std::size_t>(f)] = true;
                tr.x[static_cast<std::size_t>(f)] = dets[static_cast<std::size_t>(d)].x;
                tr.y[static_cast<std::size_t>(f)] = dets[static_cast<std::size_t>(d)].y;
                tr.z[static_cast<std::size_t>(f)] = dets[static_cast<std::size_t>(d)].z;
            } else {
                ti = new_track(dets[static_cast<std::size_t>(d)]);
            }
            next_active.push_back(ti);
        }
        active = std::move(next_active);
    }
    return tracks;
}

Track velocities(const Track& track, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("velocities: tau must be > 0");
    Track out = track;
    const int T = static_cast<int>(track.present.size());
    out.vx.assign(static_cast<std::size_t>(T), 0.0);
    out.vy.assign(static_cast<std::size_t>(T), 0.0);
    out.vz.assign(static_cast<std::size_t>(T), 0.0);
    out.velocity_valid.assign(static_cast<std::size_t>(T), false);
    for (int f = 1; f + 1 < T; ++f) {
        const std::size_t fm = static_cast<std::size_t>(f - 1), fp = static_cast<std::size_t>(f + 1);
        if (!track.present[fm] || !track.present[fp]) continue;
        const double inv = 1.0 / (2.0 * tau);
        out.vx[static_cast<std::size_t>(f)] = (track.x[fp] - track.x[fm]) * inv;
        out.vy[static_cast<std::size_t>(f)] = (track.y[fp] - track.y[fm]) * inv;
        out.vz[static_cast<std::size_t>(f)] = (track.z[fp] - track.z[fm]) * inv;
        out.velocity_valid[static_cast<std::size_t>(f)] = true;
    }
    return out;
}

double track_speed(const Track& t, int frame) {
    const std::size_t f = static_cast<std::size_t>(frame);
    if (f >= t.velocity_valid.size() || !t.velocity_valid[f])
        return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(t.vx[f] * t.vx[f] + t.vy[f] * t.vy[f] + t.vz[f] * t.vz[f]);
}

double mean_speed(const Track& t) {
    double s = 0.0;
    int n = 0;
    for (std::size_t f = 0; f < t.velocity_valid.size(); ++f)
        if (t.velocity_valid[f]) {
            s += track_speed(t, static_cast<int>(f));
            ++n;
        }
    return n > 0 ? s / n : std::numeric_limits<double>::quiet_NaN();
}

void write_tracks_csv(const std::vector<Track>& tracks, const std::string& path) {
    CsvWriter csv(path, {"frame", "id", "x_m", "y_m", "z_m", "vx", "vy", "vz", "speed"});
    for (const auto& tr : tracks) {
        for (std::size_t f = 0; f < tr.present.size(); ++f) {
            if (!tr.present[f]) continue;
            const bool vv = f < tr.velocity_valid.size() && tr.velocity_valid[f];
            csv.row({format_int(static_cast<long long>(f)), format_int(tr.id),
                     format_double(tr.x[f]), format_double(tr.y[f]), format_double(tr.z[f]),
                     format_double(vv ? tr.vx[f] : 0.0), format_double(vv ? tr.vy[f] : 0.0),
                     format_double(vv ? tr.vz[f] : 0.0),
                     vv ? format_double(track_speed(tr, static_cast<int>(f))) : "nan"});
        }
    }
    csv.close();
}

void write_profile_csv(const FocusProfile& profile, const std::string& path) {
    CsvWriter csv(path, {"depth_m", "variance"});
    for (std::size_t i = 0; i < profile.depths.size(); ++i)
        csv.row({format_double(profile.depths[i]), format_double(profile.variance[i])});
    csv.close();
}

void write_detections_csv(const std::vector<std::vector<Detection>>& det,
                          const std::string& path) {
    CsvWriter csv(path, {"frame", "id", "x_m", "y_m", "z_m", "vx", "vy", "vz", "speed"});
    for (const auto& frame_dets : det) {
        int id = 0;
        for (const auto& d : frame_dets) {
            csv.row({format_int(d.frame), format_int(id++), format_double(d.x),
                     format_double(d.y), format_double(d.z), "0", "0", "0", "nan"});
        }
    }
    csv.close();
}

} // namespace chv

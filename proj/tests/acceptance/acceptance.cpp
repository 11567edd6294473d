// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failing criteria. Each criterion pins its tolerances and runtime budget
// in code; run a subset by listing criterion numbers as arguments.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chv/analysis.hpp"
#include "chv/errors.hpp"
#include "chv/fft.hpp"
#include "chv/config.hpp"
#include "chv/experiments.hpp"
#include "chv/masks.hpp"
#include "chv/raster_io.hpp"
#include "chv/rng.hpp"
#include "chv/scenes.hpp"
#include "chv/solver.hpp"
#include "support/oracles.hpp"

using namespace chv;
namespace to = chv::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kLambda = 532e-9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Geometry make_geometry(int n, double pitch, std::vector<double> depths, int T, double tau,
                       double z_om = 0.0, double z_ms = 0.0) {
    Geometry g;
    g.nx = g.ny = n;
    g.pitch = pitch;
    g.wavelength = kLambda;
    g.depths = std::move(depths);
    g.observation_to_mask = z_om;
    g.mask_to_sensor = z_ms;
    g.frame_count = T;
    g.frame_interval = tau;
    return g;
}

// ---------------------------------------------------------------- 1
Outcome criterion_adjoint() {
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const double z_ms = inst < 10 ? 0.0 : 0.002;
        const Geometry g = make_geometry(32, 5.86e-6, {0.03, 0.05}, 4, 500e-6, 0.003, z_ms);
        const MaskStack m =
            generate_partition_masks(32, 32, 4, 4, 1000 + static_cast<std::uint64_t>(inst));
        const SensingOperator op(g, m);

        Object4D o = Object4D::like(g);
        Rng rng(50 + static_cast<std::uint64_t>(inst));
        for (auto& z : o.data) z = cdouble{rng.next_double() - 0.5, rng.next_double() - 0.5};
        Hologram h(32, 32, HologramKind::subtracted);
        for (auto& v : h.data) v = rng.next_double() - 0.5;

        const Hologram ao = op.forward(o);
        const Object4D ath = op.adjoint(h);
        const double rel = std::abs(dot(ao.data, h.data) - dot_real(o.data, ath.data)) /
                           (l2_norm(ao.data) * l2_norm(h.data));
        worst = std::max(worst, rel);
    }
    std::ostringstream os;
    os << "max relative adjoint mismatch " << worst << " over 20 instances (tol 1e-10)";
    return {worst < 1e-10, os.str()};
}

// ---------------------------------------------------------------- 2
Outcome criterion_propagation() {
    // round trip on the padded grid (pad_factor 1, band-confined input)
    const TransferFunction fwd = make_transfer(96, 96, 5.86e-6, kLambda, 0.02, 1);
    const TransferFunction bwd = make_transfer(96, 96, 5.86e-6, kLambda, -0.02, 1);
    ComplexField f(96, 96, 5.86e-6);
    {
        Rng rng(4242);
        CVector spec(f.data.size());
        for (std::size_t i = 0; i < spec.size(); ++i)
            spec[i] = fwd.spectrum[i] == cdouble{0.0, 0.0}
                          ? cdouble{0.0, 0.0}
                          : cdouble{rng.next_double() - 0.5, rng.next_double() - 0.5};
        fft2_inverse(spec, 96, 96);
        f.data = spec;
    }
    const ComplexField rt = propagate(propagate(f, fwd), bwd);
    const double rt_err = to::rel_err(rt.data, f.data);

    // impulse vs direct quadrature at a converged discretization
    const int n = 64;
    ComplexField impulse(n, n, 5.86e-6);
    impulse.at(n / 2, n / 2) = 1.0;
    const ComplexField via_fft =
        propagate(impulse, make_transfer(n, n, 5.86e-6, kLambda, 0.08, 20));
    const ComplexField direct = to::direct_propagate(impulse, kLambda, 0.08);
    double num = 0.0, den = 0.0;
    for (int iy = n / 4; iy < 3 * n / 4; ++iy)
        for (int ix = n / 4; ix < 3 * n / 4; ++ix) {
            num += std::norm(via_fft.at(iy, ix) - direct.at(iy, ix));
            den += std::norm(direct.at(iy, ix));
        }
    const double rms = std::sqrt(num / den);

    std::ostringstream os;
    os << "round-trip err " << rt_err << " (tol 1e-10), impulse-vs-quadrature RMS "
       << 100.0 * rms << "% (tol 1%)";
    return {rt_err < 1e-10 && rms < 0.01, os.str()};
}

// ---------------------------------------------------------------- 3
Outcome criterion_tv() {
    double worst = 0.0;
    SolverConfig cfg;
    for (int rep = 0; rep < 5; ++rep) {
        for (auto [T, nd, ny, nx] :
             {std::array<int, 4>{3, 2, 4, 4}, {4, 2, 3, 4}, {2, 4, 4, 2}}) {
            Object4D o(T, nd, ny, nx);
            Rng rng(300 + static_cast<std::uint64_t>(rep * 10 + T));
            for (auto& z : o.data)
                z = cdouble{rng.next_double() - 0.5, rng.next_double() - 0.5};
            for (auto [ls, lt] : {std::pair<double, double>{1.0, 0.0}, {1.0, 0.6}, {0.0, 1.0}}) {
                cfg.lambda_spatial = ls;
                cfg.lambda_temporal = lt;
                const double got = tv_norm(o, cfg);
                const double want = to::brute_tv4d(o, ls > 0 ? 1.0 : 0.0,
                                                   ls > 0 ? lt / ls : (lt > 0 ? 1.0 : 0.0));
                worst = std::max(worst, std::abs(got - want) / std::max(1.0, want));
            }
        }
    }

    // 1D two-level prox against the closed form
    cfg.lambda_spatial = 1.0;
    cfg.lambda_temporal = 0.0;
    cfg.tv_inner_iters = 600;
    double worst_prox = 0.0;
    for (auto [a, b, na, nb, w] :
         {std::tuple<double, double, int, int, double>{0.0, 3.0, 6, 10, 1.5},
          {1.0, -2.0, 5, 7, 0.8},
          {0.0, 3.0, 6, 10, 40.0}}) {
        Object4D o(1, 1, 1, na + nb);
        for (int i = 0; i < na + nb; ++i) o.data[static_cast<std::size_t>(i)] = i < na ? a : b;
        const auto want = to::prox_two_level(a, b, na, nb, w);
        const Object4D got = tv_denoise(o, w, cfg);
        for (int i = 0; i < na + nb; ++i)
            worst_prox = std::max(worst_prox,
                                  std::abs(got.data[static_cast<std::size_t>(i)].real() -
                                           want[static_cast<std::size_t>(i)]));
    }
    std::ostringstream os;
    os << "tv_norm vs brute-force rel err " << worst << " (tol 1e-12), prox vs closed form "
       << worst_prox << " (tol 1e-4)";
    return {worst < 1e-12 && worst_prox < 1e-4, os.str()};
}

// ---------------------------------------------------------------- 4
Outcome criterion_masks() {
    std::ostringstream os;
    bool pass = true;
    const int nx = 256, ny = 256, sp = 4;
    for (int T : {2, 5, 10}) {
        const MaskStack s = generate_partition_masks(nx, ny, T, sp, 777 + T);
        const MaskReport rep = validate_masks(s);
        double worst_density = 0.0;
        for (int t = 0; t < T; ++t)
            worst_density = std::max(worst_density, std::abs(s.density(t) - 1.0 / T));
        const double tol = double(sp * sp) / (nx * ny);
        const bool ok = rep.all_pass() && worst_density <= tol + 1e-15;
        pass = pass && ok;
        os << "T=" << T << (rep.disjoint ? " disjoint" : " OVERLAP")
           << (rep.complete ? " complete" : " GAPPED") << " density-dev " << worst_density
           << (ok ? " ok; " : " FAIL; ");
    }
    return {pass, os.str()};
}

// shared instance builder for criteria 5 and 8
ExperimentConfig benchmark_config() {
    ExperimentConfig cfg;
    cfg.seed = 2026;
    cfg.geometry.nx = cfg.geometry.ny = 64;
    cfg.geometry.pitch = 9.85e-3 / 256; // scene scale of the simulation study
    cfg.geometry.wavelength = kLambda;
    cfg.geometry.frame_interval = 500e-6;
    cfg.geometry.pad_factor = 2;
    cfg.masks.superpixel = 4;
    cfg.solver.lambda_spatial = -1.0; // auto
    cfg.solver.lambda_temporal = 0.0;
    cfg.solver.max_iters = 200;
    cfg.solver.tol = 1e-6;
    cfg.benchmark.base_depth = 0.07;
    cfg.benchmark.intermediate_planes = 4;
    return cfg;
}

// ---------------------------------------------------------------- 5
Outcome criterion_benchmark_trends() {
    const ExperimentConfig cfg = benchmark_config();
    const std::vector<double> fractions{1.0, 0.5, 0.2, 0.1};
    const std::vector<double> dzs{0.005, 0.015, 0.030};

    double cs[4][3], bp[4][3];
    std::ostringstream table;
    for (int fi = 0; fi < 4; ++fi)
        for (int di = 0; di < 3; ++di) {
            const BenchmarkCell cell = run_benchmark_cell(cfg, fractions[static_cast<std::size_t>(fi)],
                                                          dzs[static_cast<std::size_t>(di)]);
            if (!cell.ok) return {false, "cell failed: " + cell.error};
            cs[fi][di] = cell.psnr_cs;
            bp[fi][di] = cell.psnr_bp;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "[f=%.2f dz=%gmm cs=%.2f bp=%.2f] ",
                          fractions[static_cast<std::size_t>(fi)],
                          dzs[static_cast<std::size_t>(di)] * 1e3, cell.psnr_cs, cell.psnr_bp);
            table << buf;
        }

    bool cs_beats_bp = true, monotone_fraction = true, dz_trend = true;
    for (int fi = 0; fi < 4; ++fi)
        for (int di = 0; di < 3; ++di) cs_beats_bp = cs_beats_bp && cs[fi][di] >= bp[fi][di];
    for (int di = 0; di < 3; ++di)
        for (int fi = 0; fi + 1 < 4; ++fi)
            monotone_fraction = monotone_fraction && cs[fi][di] >= cs[fi + 1][di] - 0.3;
    dz_trend = cs[3][0] < cs[3][1] && cs[3][1] < cs[3][2];

    std::ostringstream os;
    os << table.str() << (cs_beats_bp ? "cs>=bp ok" : "cs>=bp FAIL") << ", "
       << (monotone_fraction ? "fraction-monotone ok" : "fraction-monotone FAIL") << ", "
       << (dz_trend ? "dz-trend ok" : "dz-trend FAIL");
    return {cs_beats_bp && monotone_fraction && dz_trend, os.str()};
}

// ---------------------------------------------------------------- 6
Outcome criterion_temporal_superres() {
    const int n = 160, T = 10;
    const double pitch = 20e-6, tau = 50e-6;
    const std::vector<double> depths{0.06, 0.08};
    const Geometry geom = make_geometry(n, pitch, depths, T, tau);
    const MaskStack masks = generate_partition_masks(n, n, T, 4, 606);
    const SceneSpec spec = preset_particles(n, n, pitch, depths, 7, T, tau);
    const Object4D truth = build_scene(spec);

    const auto [raw, bg] = simulate_capture(truth, masks, geom, NoiseSpec{});
    const Hologram sub = subtract_background(raw, bg);

    const SensingOperator op(geom, masks);
    SolverConfig sc;
    sc.lambda_spatial = default_lambda(op, sub);
    sc.max_iters = 200;
    sc.tol = 1e-6;
    sc.project_real = true; // scene amplitudes are real
    const auto [recon, trace] = twist_reconstruct(op, sub, sc);
    if (trace.aborted) return {false, "solver aborted"};

    auto detections = detect_particles(recon, 21, 0.5, geom);
    auto tracks = track_particles(detections, 3e-3);
    for (auto& tr : tracks) tr = velocities(tr, tau);

    // ground truth per particle per frame (positions snap to the grid)
    struct Gt {
        double x[10], y[10], z;
        int plane;
        double speed;
    };
    std::vector<Gt> gt;
    for (const auto& ob : spec.objects) {
        Gt g{};
        g.plane = ob.depth_index;
        g.z = depths[static_cast<std::size_t>(ob.depth_index)];
        g.speed = std::hypot(ob.vx, ob.vy);
        for (int t = 0; t < T; ++t) {
            g.x[t] = (std::lround((ob.x0 + ob.vx * t * tau) / pitch)) * pitch;
            g.y[t] = (std::lround((ob.y0 + ob.vy * t * tau) / pitch)) * pitch;
        }
        gt.push_back(g);
    }

    // centroid + depth gate over all (particle, frame) pairs
    int hits = 0, total = 7 * T;
    for (const auto& g : gt)
        for (int t = 0; t < T; ++t) {
            for (const auto& d : detections[static_cast<std::size_t>(t)]) {
                const double dx = (d.x - g.x[t]) / pitch, dy = (d.y - g.y[t]) / pitch;
                if (std::hypot(dx, dy) <= 2.0 && d.depth_index == g.plane) {
                    ++hits;
                    break;
                }
            }
        }

    // per-particle track speed within 10%
    int speed_ok = 0;
    for (const auto& g : gt) {
        double best_dist = 1e18;
        const Track* best = nullptr;
        for (const auto& tr : tracks) {
            double dist = 1e18;
            for (int t = 0; t < T; ++t)
                if (tr.present[static_cast<std::size_t>(t)]) {
                    dist = std::hypot((tr.x[static_cast<std::size_t>(t)] - g.x[t]) / pitch,
                                      (tr.y[static_cast<std::size_t>(t)] - g.y[t]) / pitch);
                    break;
                }
            if (dist < best_dist) {
                best_dist = dist;
                best = &tr;
            }
        }
        if (!best || best_dist > 3.0) continue;
        const double ms = mean_speed(*best);
        if (std::isfinite(ms) && std::abs(ms - g.speed) / g.speed <= 0.10) ++speed_ok;
    }

    std::ostringstream os;
    os << "centroid+depth hits " << hits << "/" << total << " (need >= " << (total * 8 / 10)
       << "), track speeds within 10%: " << speed_ok << "/7, tracks " << tracks.size();
    return {hits >= (total * 8) / 10 && speed_ok == 7, os.str()};
}

// ---------------------------------------------------------------- 7
Outcome criterion_depth_sectioning() {
    const int n = 128, nd = 120;
    const double pitch = 11.72e-6;
    std::vector<double> depths(nd);
    for (int i = 0; i < nd; ++i) depths[static_cast<std::size_t>(i)] = 0.065 + 0.043 * i / (nd - 1);
    const int plane_a = 17, plane_b = 100; // nearest planes to 71 mm and 101 mm

    const SceneSpec spec = preset_fibers(n, n, pitch, depths, plane_a, plane_b, 1, 500e-6);
    const Object4D truth = build_scene(spec);
    const Geometry geom = make_geometry(n, pitch, depths, 1, 500e-6);

    // pixels on each fiber: nonzero truth pixel nearest the object center
    auto pixel_on = [&](int plane, double x0, double y0) {
        const cdouble* s = truth.slice(0, plane);
        int bx = -1, by = -1;
        double best = 1e18;
        const double cx = n / 2 + x0 / pitch, cy = n / 2 + y0 / pitch;
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                if (std::abs(s[static_cast<std::size_t>(iy) * n + ix]) > 0.0) {
                    const double d = std::hypot(ix - cx, iy - cy);
                    if (d < best) {
                        best = d;
                        bx = ix;
                        by = iy;
                    }
                }
        return std::pair<int, int>{bx, by};
    };
    const auto [ax, ay] = pixel_on(plane_a, spec.objects[0].x0, spec.objects[0].y0);
    const auto [bx_, by_] = pixel_on(plane_b, spec.objects[1].x0, spec.objects[1].y0);

    const MaskStack full = generate_partition_masks(n, n, 1, 4, 0);
    MaskStack sub10 = generate_partition_masks(n, n, 10, 4, 909);
    sub10.frames.resize(1); // one partition class: exactly 10% of the pixels

    auto capture = [&](const MaskStack& m) {
        const auto [raw, bg] = simulate_capture(truth, m, geom, NoiseSpec{});
        return subtract_background(raw, bg);
    };
    const Hologram g_full = capture(full);
    const Hologram g_10 = capture(sub10);

    SolverConfig sc;
    sc.max_iters = 60;
    sc.tol = 1e-5;
    auto reconstruct = [&](const Hologram& g, const MaskStack& m) {
        const SensingOperator op(geom, m);
        SolverConfig c = sc;
        c.lambda_spatial = default_lambda(op, g);
        auto [vol, trace] = twist_reconstruct(op, g, c);
        return vol;
    };
    const Object4D cs_full = reconstruct(g_full, full);
    const Object4D cs_10 = reconstruct(g_10, sub10);
    const Object4D bp_full = backpropagate(g_full, geom);

    struct Named {
        const char* name;
        const Object4D* vol;
    };
    const Named volumes[] = {{"cs100", &cs_full}, {"cs10", &cs_10}, {"bp100", &bp_full}};

    bool peaks_ok = true;
    std::ostringstream os;
    FocusProfile prof_cs_a, prof_bp_a, prof_cs_b, prof_bp_b;
    for (const auto& v : volumes) {
        const FocusProfile pa = focus_profile(*v.vol, 0, ax, ay, 21, geom);
        const FocusProfile pb = focus_profile(*v.vol, 0, bx_, by_, 21, geom);
        const bool ok_a = pa.has_focus && std::abs(pa.peak_index - plane_a) <= 1;
        const bool ok_b = pb.has_focus && std::abs(pb.peak_index - plane_b) <= 1;
        peaks_ok = peaks_ok && ok_a && ok_b;
        os << v.name << " peaks(" << pa.peak_index << "," << pb.peak_index << ")"
           << (ok_a && ok_b ? " ok " : " FAIL ");
        if (v.vol == &cs_full) {
            prof_cs_a = pa;
            prof_cs_b = pb;
        }
        if (v.vol == &bp_full) {
            prof_bp_a = pa;
            prof_bp_b = pb;
        }
    }

    // optical sectioning: CS suppresses out-of-focus variance between the
    // two fibers more than BP does
    auto band_mean = [&](const FocusProfile& p) {
        double s = 0.0;
        int c = 0;
        for (int i = plane_a + 4; i <= plane_b - 4; ++i) {
            s += p.variance[static_cast<std::size_t>(i)];
            ++c;
        }
        return s / c;
    };
    const double cs_band = 0.5 * (band_mean(prof_cs_a) + band_mean(prof_cs_b));
    const double bp_band = 0.5 * (band_mean(prof_bp_a) + band_mean(prof_bp_b));
    os << "intermediate variance cs " << cs_band << " vs bp " << bp_band
       << (cs_band < bp_band ? " ok" : " FAIL");
    return {peaks_ok && cs_band < bp_band, os.str()};
}

// ---------------------------------------------------------------- 8
Outcome criterion_solver_behavior() {
    // monotone objective on a criterion-5 instance
    const ExperimentConfig cfg = benchmark_config();
    Geometry geom = cfg.geometry;
    geom.depths = {0.07, 0.073, 0.076, 0.079, 0.082, 0.085};
    geom.frame_count = 10;
    const MaskStack masks = generate_partition_masks(64, 64, 10, 4, 321);
    const SceneSpec spec =
        preset_two_plane(64, 64, geom.pitch, geom.depths, 10, geom.frame_interval);
    const Object4D truth = build_scene(spec);
    const auto [raw, bg] = simulate_capture(truth, masks, geom, NoiseSpec{});
    const Hologram sub = subtract_background(raw, bg);

    const SensingOperator op(geom, masks);
    SolverConfig sc;
    sc.lambda_spatial = default_lambda(op, sub);
    sc.max_iters = 80;
    sc.tol = 1e-10;
    sc.enforce_monotone = true;
    const auto [vol, trace] = twist_reconstruct(op, sub, sc);
    bool monotone = !trace.records.empty();
    const double slack = 1e-12 * trace.records.front().objective;
    for (std::size_t i = 1; i < trace.records.size(); ++i)
        monotone = monotone &&
                   trace.records[i].objective <= trace.records[i - 1].objective + slack;

    // noiseless sparse two-point inversion
    const Geometry g2 = make_geometry(32, 5.86e-6, {0.002}, 1, 500e-6);
    const MaskStack ones = generate_partition_masks(32, 32, 1, 1, 0);
    const SensingOperator op2(g2, ones);
    Object4D truth2 = Object4D::like(g2);
    truth2.slice(0, 0)[32 * 14 + 12] = 0.1;
    truth2.slice(0, 0)[32 * 20 + 21] = 0.08;
    const Hologram data2 = op2.forward(truth2);
    SolverConfig sc2;
    sc2.lambda_spatial = 2.0 * default_lambda(op2, data2);
    sc2.max_iters = 200;
    sc2.tol = 1e-10;
    sc2.project_real = true;
    const auto [recon2, trace2] = twist_reconstruct(op2, data2, sc2);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < truth2.size(); ++i) {
        num += std::norm(recon2.data[i] - truth2.data[i]);
        den += std::norm(truth2.data[i]);
    }
    const double rel = std::sqrt(num / den);

    std::ostringstream os;
    os << (monotone ? "objective monotone" : "objective INCREASED") << " over "
       << trace.records.size() - 1 << " iterations, two-point inversion rel err " << rel
       << " (tol 0.05)";
    return {monotone && rel < 0.05, os.str()};
}

// ---------------------------------------------------------------- 9
Outcome criterion_velocities() {
    Track lin;
    lin.id = 0;
    const int T = 8;
    lin.present.assign(T, true);
    lin.x.resize(T);
    lin.y.resize(T);
    lin.z.resize(T);
    const double tau = 500e-6, vx = 1.75, vy = -0.5, vz = 0.25;
    for (int t = 0; t < T; ++t) {
        lin.x[static_cast<std::size_t>(t)] = vx * tau * t;
        lin.y[static_cast<std::size_t>(t)] = vy * tau * t;
        lin.z[static_cast<std::size_t>(t)] = vz * tau * t;
    }
    const Track v = velocities(lin, tau);
    bool exact = true;
    const double want = std::sqrt(vx * vx + vy * vy + vz * vz);
    for (int t = 1; t + 1 < T; ++t)
        exact = exact && v.velocity_valid[static_cast<std::size_t>(t)] &&
                std::abs(track_speed(v, t) - want) <= 1e-12 * want;

    Track hand;
    hand.id = 1;
    hand.present = {true, true, true};
    hand.x = {0.0, 1e-3, 4e-3};
    hand.y = {0.0, 0.0, 0.0};
    hand.z = {0.0, 0.0, 0.0};
    const Track hv = velocities(hand, 500e-6);
    const bool hand_ok = hv.velocity_valid[1] && std::abs(hv.vx[1] - 4.0) < 1e-12;

    std::ostringstream os;
    os << (exact ? "constant-velocity speeds exact" : "constant-velocity FAIL")
       << ", hand case v = " << hv.vx[1] << " m/s (want 4)";
    return {exact && hand_ok, os.str()};
}

// ---------------------------------------------------------------- 10
Outcome criterion_io() {
    const fs::path dir = fs::temp_directory_path() / "chv_acceptance_io";
    fs::create_directories(dir);

    // bit-identical round trip
    Object4D o(2, 2, 6, 5);
    Rng rng(1234);
    for (auto& z : o.data)
        z = cdouble{static_cast<float>(rng.next_double() * 2 - 1),
                    static_cast<float>(rng.next_double() * 2 - 1)};
    const fs::path p1 = dir / "a.chv", p2 = dir / "b.chv";
    write_raster(p1.string(), o, 1e-5, kLambda);
    const Object4D back = to_object4d(read_raster(p1.string()));
    bool roundtrip = back.same_shape(o);
    for (std::size_t i = 0; roundtrip && i < o.size(); ++i)
        roundtrip = back.data[i] == o.data[i];
    write_raster(p2.string(), back, 1e-5, kLambda);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    roundtrip = roundtrip && slurp(p1) == slurp(p2);

    // golden endianness file
    const fs::path golden = fs::path(CHV_TEST_DATA_DIR) / "golden.chv";
    bool golden_ok = false;
    try {
        const Raster r = read_raster(golden.string());
        const float expected[6] = {0.5f, -1.25f, 3.0f, 65536.5f, -0.0078125f, 255.0f};
        golden_ok = r.payload.size() == 6;
        for (int i = 0; golden_ok && i < 6; ++i)
            golden_ok = r.payload[static_cast<std::size_t>(i)] == expected[i];
        const fs::path rewrite = dir / "golden_rewrite.chv";
        write_raster(rewrite.string(), r);
        golden_ok = golden_ok && slurp(rewrite) == slurp(golden);
    } catch (const Error&) {
        golden_ok = false;
    }

    // corruption detection names the byte counts
    bool corrupt_ok = false;
    {
        const fs::path p3 = dir / "c.chv";
        Hologram h(4, 4, HologramKind::raw);
        write_raster(p3.string(), h);
        std::string blob = slurp(p3);
        std::ofstream out(p3, std::ios::binary | std::ios::trunc);
        out.write(blob.data(), static_cast<std::streamsize>(blob.size() - 5));
        out.close();
        try {
            read_raster(p3.string());
        } catch (const IoError& e) {
            const std::string msg = e.what();
            corrupt_ok = msg.find("64") != std::string::npos &&
                         msg.find("59") != std::string::npos;
        }
    }

    std::ostringstream os;
    os << (roundtrip ? "round-trip bit-identical" : "round-trip FAIL") << ", "
       << (golden_ok ? "golden ok" : "golden FAIL") << ", "
       << (corrupt_ok ? "corruption reported" : "corruption FAIL");
    return {roundtrip && golden_ok && corrupt_ok, os.str()};
}

struct Criterion {
    int number;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<Criterion> criteria = {
        {1, "adjoint consistency", 10, criterion_adjoint},
        {2, "propagation round-trip and quadrature oracle", 30, criterion_propagation},
        {3, "TV norm and prox oracles", 5, criterion_tv},
        {4, "mask partition properties", 5, criterion_masks},
        {5, "subsampling/depth PSNR trends", 600, criterion_benchmark_trends},
        {6, "10x temporal super-resolution with tracking", 300, criterion_temporal_superres},
        {7, "two-fiber depth sectioning", 300, criterion_depth_sectioning},
        {8, "solver monotonicity and two-point inversion", 120, criterion_solver_behavior},
        {9, "central-difference velocities", 1, criterion_velocities},
        {10, "raster I/O and golden file", 5, criterion_io},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.number)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = secs <= c.budget_s;
        const bool pass = out.pass && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] criterion %d: %s — %s (%.1fs%s)\n", pass ? "PASS" : "FAIL", c.number,
                    c.name, out.detail.c_str(), secs,
                    in_budget ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    return failures;
}

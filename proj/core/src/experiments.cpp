#include "chv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "chv/analysis.hpp"
#include "chv/csv.hpp"
#include "chv/errors.hpp"
#include "chv/image_io.hpp"
#include "chv/parallel.hpp"
#include "chv/plot.hpp"
#include "chv/raster_io.hpp"
#include "chv/rng.hpp"
#include "chv/solver.hpp"

namespace chv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "chv 0.1.0";

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::string resolve_input(const ExperimentConfig& cfg, const std::string& rel) {
    fs::path p(rel);
    if (p.is_absolute()) return p.string();
    return (fs::path(cfg.output_dir) / p).string();
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const std::vector<std::string>& outputs, json extras = json::object()) {
    json m;
    m["command"] = command;
    m["config_hash"] = config_hash_hex(cfg);
    m["seed"] = cfg.seed;
    m["version"] = kVersion;
    m["outputs"] = outputs;
    for (auto& [k, v] : extras.items()) m[k] = v;
    const fs::path path = fs::path(cfg.output_dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << m.dump(2) << '\n';
    out.close();
    if (out.fail()) throw IoError("manifest write failed: " + path.string());
}

void note(bool quiet, const std::string& msg) {
    if (!quiet) std::fprintf(stderr, "%s\n", msg.c_str());
}

void write_depth_previews(const Object4D& vol, const fs::path& dir, const std::string& prefix,
                          std::vector<std::string>& outputs) {
    fs::create_directories(dir);
    for (int n = 0; n < vol.nd; ++n) {
        RVector mag(static_cast<std::size_t>(vol.ny) * vol.nx);
        const cdouble* s = vol.slice(0, n);
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(s[i]);
        char name[64];
        std::snprintf(name, sizeof(name), "%s_z%03d.png", prefix.c_str(), n);
        write_png((dir / name).string(), to_gray8(mag, vol.ny, vol.nx));
        outputs.push_back((fs::path("previews") / name).string());
    }
}

// lambda_temporal < 0 means |value| * resolved spatial lambda.
SolverConfig resolve_solver(const ExperimentConfig& cfg, const SensingOperator& op,
                            const Hologram& g) {
    SolverConfig sc = cfg.solver_config();
    if (sc.lambda_spatial < 0.0) sc.lambda_spatial = default_lambda(op, g);
    if (sc.lambda_temporal < 0.0) sc.lambda_temporal = -sc.lambda_temporal * sc.lambda_spatial;
    return sc;
}

std::vector<double> depth_grid(double base, double dz, int intermediate) {
    const int n = intermediate + 2;
    std::vector<double> depths(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        depths[static_cast<std::size_t>(i)] = base + dz * i / (n - 1);
    return depths;
}

} // namespace

SceneSpec scene_from_config(const ExperimentConfig& cfg) {
    const Geometry& g = cfg.geometry;
    if (cfg.scene.preset == "two_plane")
        return preset_two_plane(g.nx, g.ny, g.pitch, g.depths, g.frame_count, g.frame_interval);
    if (cfg.scene.preset == "fibers")
        return preset_fibers(g.nx, g.ny, g.pitch, g.depths, 0, g.depth_count() - 1,
                             g.frame_count, g.frame_interval);
    if (cfg.scene.preset == "particles")
        return preset_particles(g.nx, g.ny, g.pitch, g.depths, cfg.scene.particle_count,
                                g.frame_count, g.frame_interval);
    if (!cfg.scene.preset.empty())
        throw InvalidArgument("config: unknown scene preset '" + cfg.scene.preset + "'");

    SceneSpec spec;
    spec.kind = SceneKind::two_plane;
    spec.nx = g.nx;
    spec.ny = g.ny;
    spec.pitch = g.pitch;
    spec.depths = g.depths;
    spec.frame_count = g.frame_count;
    spec.frame_interval = g.frame_interval;
    spec.objects = cfg.scene.objects;
    return spec;
}

MaskStack masks_from_config(const ExperimentConfig& cfg) {
    const Geometry& g = cfg.geometry;
    const std::uint64_t seed = derive_seed(cfg.seed, "masks");
    if (cfg.masks.type == "bernoulli")
        return generate_bernoulli_masks(g.nx, g.ny, g.frame_count, cfg.masks.superpixel,
                                        cfg.masks.density, seed);
    return generate_partition_masks(g.nx, g.ny, g.frame_count, cfg.masks.superpixel, seed);
}

int run_masks(const ExperimentConfig& cfg, bool quiet) {
    cfg.geometry.validate();
    const fs::path dir = ensure_out_dir(cfg);
    MaskStack stack = masks_from_config(cfg);
    write_mask_stack((dir / "masks").string(), stack);

    const MaskReport rep = validate_masks(stack);
    json report;
    report["frame_density"] = rep.frame_density;
    report["binary"] = rep.binary;
    report["disjoint"] = rep.disjoint;
    report["complete"] = rep.complete;
    report["block_constant"] = rep.block_constant;
    report["coverage_gap"] = rep.coverage_gap;
    report["summary"] = rep.summary();
    {
        std::ofstream out(dir / "validation_report.json", std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write validation report");
        out << report.dump(2) << '\n';
    }

    std::vector<std::string> outputs{"masks/index.json", "validation_report.json"};
    for (int t = 0; t < stack.frame_count(); ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "masks/frame_%03d.chv", t);
        outputs.push_back(name);
    }
    write_manifest(cfg, "masks", outputs, json{{"mask_type", cfg.masks.type}});

    // Bernoulli stacks legitimately overlap and leave gaps; only the
    // properties the generator promises are enforced.
    const bool pass = cfg.masks.type == "partition"
                          ? rep.all_pass()
                          : (rep.binary && rep.block_constant);
    note(quiet, "masks: " + rep.summary());
    return pass ? kExitOk : kExitValidation;
}

int run_simulate(const ExperimentConfig& cfg, bool quiet) {
    cfg.geometry.validate();
    const fs::path dir = ensure_out_dir(cfg);

    const SceneSpec spec = scene_from_config(cfg);
    Object4D truth = build_scene(spec);
    MaskStack stack = masks_from_config(cfg);
    auto [raw, background] = simulate_capture(truth, stack, cfg.geometry, cfg.noise_spec());
    Hologram sub = subtract_background(raw, background);

    write_mask_stack((dir / "masks").string(), stack);
    write_raster((dir / "truth.chv").string(), truth, cfg.geometry.pitch,
                 cfg.geometry.wavelength);
    write_raster((dir / "raw.chv").string(), raw, cfg.geometry.pitch, cfg.geometry.wavelength);
    write_raster((dir / "background.chv").string(), background, cfg.geometry.pitch,
                 cfg.geometry.wavelength);
    write_raster((dir / "subtracted.chv").string(), sub, cfg.geometry.pitch,
                 cfg.geometry.wavelength);

    std::vector<std::string> outputs{"truth.chv", "raw.chv", "background.chv",
                                     "subtracted.chv", "masks/index.json"};
    write_manifest(cfg, "simulate", outputs,
                   json{{"objects", spec.objects.size()}, {"noise_model", cfg.noise.model}});
    note(quiet, "simulate: wrote " + std::to_string(outputs.size()) + " outputs to " +
                    dir.string());
    return kExitOk;
}

int run_reconstruct(const ExperimentConfig& cfg, bool quiet) {
    cfg.geometry.validate();
    const fs::path dir = ensure_out_dir(cfg);

    Hologram holo = to_hologram(read_raster(resolve_input(cfg, cfg.reconstruct.hologram)));
    MaskStack stack = read_mask_stack(resolve_input(cfg, cfg.reconstruct.masks_index));
    if (holo.kind != HologramKind::subtracted)
        throw InvalidArgument("reconstruct: input hologram must be kind subtracted");

    std::vector<std::string> outputs;
    json extras;
    const bool want_cs = cfg.reconstruct.method != "bp";
    const bool want_bp = cfg.reconstruct.method != "cs";

    if (want_bp) {
        Object4D bp = backpropagate(holo, stack, cfg.geometry);
        write_raster((dir / "recon_bp.chv").string(), bp, cfg.geometry.pitch,
                     cfg.geometry.wavelength);
        outputs.push_back("recon_bp.chv");
        write_depth_previews(bp, dir / "previews", "bp", outputs);
    }
    if (want_cs) {
        SensingOperator op(cfg.geometry, stack);
        const SolverConfig sc = resolve_solver(cfg, op, holo);
        auto [recon, trace] = twist_reconstruct(op, holo, sc);
        write_trace_csv(trace, (dir / "trace.csv").string());
        outputs.push_back("trace.csv");
        extras["lambda_used"] = trace.lambda_used;
        extras["iterations"] = trace.records.empty() ? 0 : trace.records.back().iteration;
        extras["converged"] = trace.converged;
        extras["operator_norm"] = trace.operator_norm;
        if (trace.aborted) {
            write_manifest(cfg, "reconstruct", outputs, extras);
            note(quiet, "reconstruct: solver aborted on non-finite values; trace written");
            return kExitNumerical;
        }
        write_raster((dir / "recon_cs.chv").string(), recon, cfg.geometry.pitch,
                     cfg.geometry.wavelength);
        outputs.push_back("recon_cs.chv");
        write_depth_previews(recon, dir / "previews", "cs", outputs);
        note(quiet, "reconstruct: cs lambda=" + format_double(trace.lambda_used) +
                        " iterations=" + std::to_string(trace.records.back().iteration) +
                        (trace.converged ? " (converged)" : ""));
    }
    write_manifest(cfg, "reconstruct", outputs, extras);
    return kExitOk;
}

int run_analyze(const ExperimentConfig& cfg, bool quiet) {
    cfg.geometry.validate();
    const fs::path dir = ensure_out_dir(cfg);

    Object4D vol = to_object4d(read_raster(resolve_input(cfg, cfg.analysis.input)));
    if (vol.nd != cfg.geometry.depth_count() || vol.nx != cfg.geometry.nx ||
        vol.ny != cfg.geometry.ny)
        throw DimensionMismatch("analyze: volume shape does not match configured geometry");

    std::vector<std::string> outputs;

    // Focus profiles at the requested pixels (grid center by default).
    std::vector<std::pair<int, int>> pixels = cfg.analysis.profile_pixels;
    if (pixels.empty()) pixels.emplace_back(vol.nx / 2, vol.ny / 2);
    std::vector<Series> profile_series;
    const auto palette = default_palette();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const auto [px, py] = pixels[i];
        FocusProfile fp = focus_profile(vol, 0, px, py, cfg.analysis.window, cfg.geometry);
        char name[64];
        std::snprintf(name, sizeof(name), "profile_x%03d_y%03d.csv", px, py);
        write_profile_csv(fp, (dir / name).string());
        outputs.push_back(name);

        Series s;
        char label[64];
        std::snprintf(label, sizeof(label), "(%d,%d)", px, py);
        s.label = label;
        s.color = palette[i % palette.size()];
        for (std::size_t n = 0; n < fp.depths.size(); ++n) {
            s.x.push_back(fp.depths[n] * 1e3); // mm
            s.y.push_back(fp.variance[n]);
        }
        profile_series.push_back(std::move(s));
    }
    ChartSpec pspec;
    pspec.title = "NORMALIZED VARIANCE VS DEPTH";
    pspec.xlabel = "DEPTH (MM)";
    pspec.ylabel = "VAR";
    write_png((dir / "variance_vs_depth.png").string(),
              render_line_chart(profile_series, pspec));
    outputs.push_back("variance_vs_depth.png");

    // Particles: detect, associate, differentiate.
    auto detections =
        detect_particles(vol, cfg.analysis.window, cfg.analysis.reject_threshold, cfg.geometry);
    write_detections_csv(detections, (dir / "detections.csv").string());
    outputs.push_back("detections.csv");

    auto tracks = track_particles(detections, cfg.analysis.max_jump);
    for (auto& tr : tracks) tr = velocities(tr, cfg.geometry.frame_interval);
    write_tracks_csv(tracks, (dir / "tracks.csv").string());
    outputs.push_back("tracks.csv");

    std::vector<Series> xy, xz, speed;
    for (const auto& tr : tracks) {
        Series sxy, sxz, ssp;
        const Rgb color = palette[static_cast<std::size_t>(tr.id) % palette.size()];
        sxy.color = sxz.color = ssp.color = color;
        char label[32];
        std::snprintf(label, sizeof(label), "P%d", tr.id);
        sxy.label = sxz.label = ssp.label = label;
        for (std::size_t f = 0; f < tr.present.size(); ++f) {
            if (!tr.present[f]) continue;
            sxy.x.push_back(tr.x[f] * 1e3);
            sxy.y.push_back(tr.y[f] * 1e3);
            sxz.x.push_back(tr.x[f] * 1e3);
            sxz.y.push_back(tr.z[f] * 1e3);
            const double sp = track_speed(tr, static_cast<int>(f));
            if (std::isfinite(sp)) {
                ssp.x.push_back(static_cast<double>(f) * cfg.geometry.frame_interval * 1e3);
                ssp.y.push_back(sp);
            }
        }
        xy.push_back(std::move(sxy));
        xz.push_back(std::move(sxz));
        speed.push_back(std::move(ssp));
    }
    ChartSpec cxy;
    cxy.title = "TRACKS X-Y";
    cxy.xlabel = "X (MM)";
    cxy.ylabel = "Y";
    write_png((dir / "tracks_xy.png").string(), render_line_chart(xy, cxy));
    ChartSpec cxz;
    cxz.title = "TRACKS X-Z";
    cxz.xlabel = "X (MM)";
    cxz.ylabel = "Z";
    write_png((dir / "tracks_xz.png").string(), render_line_chart(xz, cxz));
    ChartSpec csp;
    csp.title = "SPEED VS TIME";
    csp.xlabel = "TIME (MS)";
    csp.ylabel = "M/S";
    write_png((dir / "speed_vs_time.png").string(), render_line_chart(speed, csp));
    outputs.push_back("tracks_xy.png");
    outputs.push_back("tracks_xz.png");
    outputs.push_back("speed_vs_time.png");

    write_manifest(cfg, "analyze", outputs, json{{"tracks", tracks.size()}});
    note(quiet, "analyze: " + std::to_string(tracks.size()) + " tracks");
    return kExitOk;
}

BenchmarkCell run_benchmark_cell(const ExperimentConfig& cfg, double fraction, double dz) {
    BenchmarkCell cell;
    cell.fraction = fraction;
    cell.dz = dz;
    const int T = static_cast<int>(std::lround(1.0 / fraction));
    if (T < 1) throw InvalidArgument("benchmark: fraction must be in (0, 1]");
    cell.frame_count = T;

    Geometry geom = cfg.geometry;
    geom.depths = depth_grid(cfg.benchmark.base_depth, dz, cfg.benchmark.intermediate_planes);
    geom.frame_count = T;
    geom.validate();

    char tag[64];
    std::snprintf(tag, sizeof(tag), "bench-f%.3f-dz%.6f", fraction, dz);
    MaskStack stack = generate_partition_masks(geom.nx, geom.ny, T, cfg.masks.superpixel,
                                               derive_seed(cfg.seed, tag));

    const SceneSpec spec = preset_two_plane(geom.nx, geom.ny, geom.pitch, geom.depths, T,
                                            geom.frame_interval);
    Object4D truth = build_scene(spec);
    auto [raw, background] = simulate_capture(truth, stack, geom, cfg.noise_spec());
    Hologram sub = subtract_background(raw, background);

    SensingOperator op(geom, stack);
    SolverConfig sc = cfg.solver_config();
    if (sc.lambda_spatial < 0.0) sc.lambda_spatial = default_lambda(op, sub);
    if (sc.lambda_temporal < 0.0) sc.lambda_temporal = -sc.lambda_temporal * sc.lambda_spatial;
    cell.lambda = sc.lambda_spatial;

    auto [recon_cs, trace] = twist_reconstruct(op, sub, sc);
    if (trace.aborted) {
        cell.ok = false;
        cell.error = "solver aborted (non-finite)";
        return cell;
    }
    cell.iterations = trace.records.empty() ? 0 : trace.records.back().iteration;

    Object4D recon_bp = backpropagate(sub, stack, geom);
    cell.psnr_cs = psnr_fitted(recon_cs, truth);
    cell.psnr_bp = psnr_fitted(recon_bp, truth);
    cell.ok = true;
    return cell;
}

int run_benchmark(const ExperimentConfig& cfg, int jobs, bool quiet) {
    cfg.geometry.validate();
    const fs::path dir = ensure_out_dir(cfg);

    std::vector<std::pair<double, double>> cells;
    if (cfg.benchmark.single_cell) {
        cells.push_back(*cfg.benchmark.single_cell);
    } else {
        for (double f : cfg.benchmark.fractions)
            for (double dz : cfg.benchmark.dz) cells.emplace_back(f, dz);
    }

    std::vector<BenchmarkCell> results(cells.size());
    const int hw = thread_budget();
    if (jobs < 1) jobs = 1;
    if (jobs > 1) set_thread_budget(std::max(1, hw / jobs));
    {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                try {
                    results[i] = run_benchmark_cell(cfg, cells[i].first, cells[i].second);
                } catch (const Error& e) {
                    results[i].fraction = cells[i].first;
                    results[i].dz = cells[i].second;
                    results[i].ok = false;
                    results[i].error = e.what();
                }
                note(quiet, "benchmark: cell fraction=" + format_double(cells[i].first) +
                                " dz=" + format_double(cells[i].second) +
                                (results[i].ok ? " done" : " FAILED: " + results[i].error));
            }
        };
        const int spawn = std::min<int>(jobs, static_cast<int>(cells.size()));
        for (int t = 1; t < spawn; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }
    if (jobs > 1) set_thread_budget(hw);

    CsvWriter csv((dir / "psnr.csv").string(),
                  {"fraction", "dz_m", "method", "psnr_db", "status"});
    for (const auto& c : results) {
        const std::string status = c.ok ? "ok" : c.error;
        csv.row({format_double(c.fraction), format_double(c.dz), "cs",
                 c.ok ? format_double(c.psnr_cs) : "nan", status});
        csv.row({format_double(c.fraction), format_double(c.dz), "bp",
                 c.ok ? format_double(c.psnr_bp) : "nan", status});
    }
    csv.close();

    // One line per (fraction, method); x axis in mm, CS solid, BP dashed.
    std::vector<Series> series;
    const auto palette = default_palette();
    std::vector<double> fracs = cfg.benchmark.fractions;
    if (cfg.benchmark.single_cell) fracs = {cfg.benchmark.single_cell->first};
    for (std::size_t fi = 0; fi < fracs.size(); ++fi) {
        Series cs, bp;
        char lbl[48];
        std::snprintf(lbl, sizeof(lbl), "CS %d%%", static_cast<int>(std::lround(fracs[fi] * 100)));
        cs.label = lbl;
        std::snprintf(lbl, sizeof(lbl), "BP %d%%", static_cast<int>(std::lround(fracs[fi] * 100)));
        bp.label = lbl;
        cs.color = bp.color = palette[fi % palette.size()];
        bp.dashed = true;
        for (const auto& c : results) {
            if (c.fraction != fracs[fi] || !c.ok) continue;
            cs.x.push_back(c.dz * 1e3);
            cs.y.push_back(c.psnr_cs);
            bp.x.push_back(c.dz * 1e3);
            bp.y.push_back(c.psnr_bp);
        }
        series.push_back(std::move(cs));
        series.push_back(std::move(bp));
    }
    ChartSpec spec;
    spec.title = "PSNR VS OBJECT SPACING";
    spec.xlabel = "DZ (MM)";
    spec.ylabel = "DB";
    write_png((dir / "psnr_plot.png").string(), render_line_chart(series, spec));

    write_manifest(cfg, "benchmark", {"psnr.csv", "psnr_plot.png"},
                   json{{"cells", cells.size()}});
    return kExitOk;
}

} // namespace chv

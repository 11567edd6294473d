#include "chv/config.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chv/errors.hpp"
#include "chv/rng.hpp"

namespace chv {

namespace {

using nlohmann::json;

// Bad config fields should read as usage errors, not JSON tracebacks.
template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(std::string("config: bad value for '") + key + "'");
    }
}

SceneObject parse_object(const json& j) {
    SceneObject ob;
    const std::string shape = get_or<std::string>(j, "shape", "disk");
    if (shape == "disk")
        ob.shape = ObjectShape::disk;
    else if (shape == "bar")
        ob.shape = ObjectShape::bar;
    else if (shape == "fiber")
        ob.shape = ObjectShape::fiber;
    else
        throw InvalidArgument("config: unknown object shape '" + shape + "'");
    ob.depth_index = get_or(j, "depth_index", 0);
    ob.amplitude = get_or(j, "amplitude", 0.1);
    ob.x0 = get_or(j, "x0_m", 0.0);
    ob.y0 = get_or(j, "y0_m", 0.0);
    ob.vx = get_or(j, "vx_mps", 0.0);
    ob.vy = get_or(j, "vy_mps", 0.0);
    ob.size = get_or(j, "size_m", 0.0);
    ob.length = get_or(j, "length_m", 0.0);
    ob.angle = get_or(j, "angle_rad", 0.0);
    ob.curve_amplitude = get_or(j, "curve_amplitude_m", 0.0);
    ob.curve_cycles = get_or(j, "curve_cycles", 1.0);
    return ob;
}

json object_to_json(const SceneObject& ob) {
    json j;
    j["shape"] = ob.shape == ObjectShape::disk  ? "disk"
                 : ob.shape == ObjectShape::bar ? "bar"
                                                : "fiber";
    j["depth_index"] = ob.depth_index;
    j["amplitude"] = ob.amplitude;
    j["x0_m"] = ob.x0;
    j["y0_m"] = ob.y0;
    j["vx_mps"] = ob.vx;
    j["vy_mps"] = ob.vy;
    j["size_m"] = ob.size;
    j["length_m"] = ob.length;
    j["angle_rad"] = ob.angle;
    j["curve_amplitude_m"] = ob.curve_amplitude;
    j["curve_cycles"] = ob.curve_cycles;
    return j;
}

} // namespace

ExperimentConfig::ExperimentConfig() {
    geometry.nx = 256;
    geometry.ny = 256;
    geometry.pitch = 5.86e-6;
    geometry.wavelength = 532e-9;
    geometry.depths = {0.07};
    geometry.observation_to_mask = 0.0;
    geometry.mask_to_sensor = 0.0;
    geometry.frame_count = 1;
    geometry.frame_interval = 500e-6;
    geometry.pad_factor = 2;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config: parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);

    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        cfg.geometry.nx = get_or(g, "nx", cfg.geometry.nx);
        cfg.geometry.ny = get_or(g, "ny", cfg.geometry.ny);
        cfg.geometry.pitch = get_or(g, "pitch_m", cfg.geometry.pitch);
        cfg.geometry.wavelength = get_or(g, "wavelength_m", cfg.geometry.wavelength);
        cfg.geometry.depths = get_or(g, "depths_m", cfg.geometry.depths);
        cfg.geometry.observation_to_mask =
            get_or(g, "observation_to_mask_m", cfg.geometry.observation_to_mask);
        cfg.geometry.mask_to_sensor = get_or(g, "mask_to_sensor_m", cfg.geometry.mask_to_sensor);
        cfg.geometry.frame_count = get_or(g, "frame_count", cfg.geometry.frame_count);
        cfg.geometry.frame_interval =
            get_or(g, "frame_interval_s", cfg.geometry.frame_interval);
        cfg.geometry.pad_factor = get_or(g, "pad_factor", cfg.geometry.pad_factor);
    }
    if (j.contains("masks")) {
        const json& m = j.at("masks");
        cfg.masks.type = get_or<std::string>(m, "type", cfg.masks.type);
        cfg.masks.superpixel = get_or(m, "superpixel", cfg.masks.superpixel);
        cfg.masks.density = get_or(m, "density", cfg.masks.density);
        if (cfg.masks.type != "partition" && cfg.masks.type != "bernoulli")
            throw InvalidArgument("config: masks.type must be partition or bernoulli");
    }
    if (j.contains("scene")) {
        const json& s = j.at("scene");
        cfg.scene.preset = get_or<std::string>(s, "preset", cfg.scene.preset);
        cfg.scene.particle_count = get_or(s, "particle_count", cfg.scene.particle_count);
        if (s.contains("objects"))
            for (const auto& o : s.at("objects")) cfg.scene.objects.push_back(parse_object(o));
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        cfg.noise.model = get_or<std::string>(n, "model", cfg.noise.model);
        cfg.noise.sigma = get_or(n, "sigma", cfg.noise.sigma);
        if (cfg.noise.model != "none" && cfg.noise.model != "gaussian")
            throw InvalidArgument("config: noise.model must be none or gaussian");
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        cfg.solver.lambda_spatial = get_or(s, "lambda_spatial", cfg.solver.lambda_spatial);
        cfg.solver.lambda_temporal = get_or(s, "lambda_temporal", cfg.solver.lambda_temporal);
        cfg.solver.max_iters = get_or(s, "max_iters", cfg.solver.max_iters);
        cfg.solver.tol = get_or(s, "tol", cfg.solver.tol);
        cfg.solver.tv_inner_iters = get_or(s, "tv_inner_iters", cfg.solver.tv_inner_iters);
        cfg.solver.enforce_monotone = get_or(s, "enforce_monotone", cfg.solver.enforce_monotone);
        cfg.solver.project_real = get_or(s, "project_real", cfg.solver.project_real);
        cfg.solver.twist_alpha = get_or(s, "twist_alpha", cfg.solver.twist_alpha);
        cfg.solver.twist_beta = get_or(s, "twist_beta", cfg.solver.twist_beta);
        cfg.solver.norm_iterations = get_or(s, "norm_iterations", cfg.solver.norm_iterations);
    }
    if (j.contains("reconstruct")) {
        const json& r = j.at("reconstruct");
        cfg.reconstruct.method = get_or<std::string>(r, "method", cfg.reconstruct.method);
        cfg.reconstruct.hologram = get_or<std::string>(r, "hologram", cfg.reconstruct.hologram);
        cfg.reconstruct.masks_index =
            get_or<std::string>(r, "masks_index", cfg.reconstruct.masks_index);
        if (cfg.reconstruct.method != "cs" && cfg.reconstruct.method != "bp" &&
            cfg.reconstruct.method != "both")
            throw InvalidArgument("config: reconstruct.method must be cs, bp or both");
    }
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        cfg.analysis.input = get_or<std::string>(a, "input", cfg.analysis.input);
        cfg.analysis.window = get_or(a, "window", cfg.analysis.window);
        cfg.analysis.reject_threshold =
            get_or(a, "reject_threshold", cfg.analysis.reject_threshold);
        cfg.analysis.max_jump = get_or(a, "max_jump_m", cfg.analysis.max_jump);
        if (a.contains("profile_pixels"))
            for (const auto& p : a.at("profile_pixels")) {
                if (!p.is_array() || p.size() != 2)
                    throw InvalidArgument("config: profile_pixels entries must be [x, y]");
                cfg.analysis.profile_pixels.emplace_back(p[0].get<int>(), p[1].get<int>());
            }
    }
    if (j.contains("benchmark")) {
        const json& b = j.at("benchmark");
        cfg.benchmark.fractions = get_or(b, "fractions", cfg.benchmark.fractions);
        cfg.benchmark.dz = get_or(b, "dz_m", cfg.benchmark.dz);
        cfg.benchmark.base_depth = get_or(b, "base_depth_m", cfg.benchmark.base_depth);
        cfg.benchmark.intermediate_planes =
            get_or(b, "intermediate_planes", cfg.benchmark.intermediate_planes);
        if (b.contains("single_cell")) {
            const json& c = b.at("single_cell");
            cfg.benchmark.single_cell = {get_or(c, "fraction", 1.0), get_or(c, "dz_m", 0.005)};
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["geometry"] = {{"nx", geometry.nx},
                     {"ny", geometry.ny},
                     {"pitch_m", geometry.pitch},
                     {"wavelength_m", geometry.wavelength},
                     {"depths_m", geometry.depths},
                     {"observation_to_mask_m", geometry.observation_to_mask},
                     {"mask_to_sensor_m", geometry.mask_to_sensor},
                     {"frame_count", geometry.frame_count},
                     {"frame_interval_s", geometry.frame_interval},
                     {"pad_factor", geometry.pad_factor}};
    j["masks"] = {{"type", masks.type},
                  {"superpixel", masks.superpixel},
                  {"density", masks.density}};
    json objs = json::array();
    for (const auto& ob : scene.objects) objs.push_back(object_to_json(ob));
    j["scene"] = {{"preset", scene.preset},
                  {"particle_count", scene.particle_count},
                  {"objects", objs}};
    j["noise"] = {{"model", noise.model}, {"sigma", noise.sigma}};
    j["solver"] = {{"lambda_spatial", solver.lambda_spatial},
                   {"lambda_temporal", solver.lambda_temporal},
                   {"max_iters", solver.max_iters},
                   {"tol", solver.tol},
                   {"tv_inner_iters", solver.tv_inner_iters},
                   {"enforce_monotone", solver.enforce_monotone},
                   {"project_real", solver.project_real},
                   {"twist_alpha", solver.twist_alpha},
                   {"twist_beta", solver.twist_beta},
                   {"norm_iterations", solver.norm_iterations}};
    j["reconstruct"] = {{"method", reconstruct.method},
                        {"hologram", reconstruct.hologram},
                        {"masks_index", reconstruct.masks_index}};
    json pixels = json::array();
    for (const auto& p : analysis.profile_pixels) pixels.push_back({p.first, p.second});
    j["analysis"] = {{"input", analysis.input},
                     {"window", analysis.window},
                     {"reject_threshold", analysis.reject_threshold},
                     {"max_jump_m", analysis.max_jump},
                     {"profile_pixels", pixels}};
    j["benchmark"] = {{"fractions", benchmark.fractions},
                      {"dz_m", benchmark.dz},
                      {"base_depth_m", benchmark.base_depth},
                      {"intermediate_planes", benchmark.intermediate_planes}};
    if (benchmark.single_cell)
        j["benchmark"]["single_cell"] = {{"fraction", benchmark.single_cell->first},
                                         {"dz_m", benchmark.single_cell->second}};
    return j.dump();
}

SolverConfig ExperimentConfig::solver_config() const {
    SolverConfig sc;
    sc.lambda_spatial = solver.lambda_spatial;
    sc.lambda_temporal = solver.lambda_temporal;
    sc.max_iters = solver.max_iters;
    sc.tol = solver.tol;
    sc.tv_inner_iters = solver.tv_inner_iters;
    sc.enforce_monotone = solver.enforce_monotone;
    sc.project_real = solver.project_real;
    sc.twist_alpha = solver.twist_alpha;
    sc.twist_beta = solver.twist_beta;
    sc.norm_iterations = solver.norm_iterations;
    return sc;
}

NoiseSpec ExperimentConfig::noise_spec() const {
    NoiseSpec n;
    n.model = noise.model == "gaussian" ? NoiseSpec::Model::gaussian : NoiseSpec::Model::none;
    n.sigma = noise.sigma;
    n.seed = derive_seed(seed, "noise");
    return n;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
    const std::string s = cfg.canonical_json();
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace chv

#include <doctest.h>

#include "chv/config.hpp"
#include "chv/errors.hpp"

using namespace chv;

TEST_SUITE("config") {

TEST_CASE("defaults carry the bench constants") {
    const ExperimentConfig cfg;
    CHECK(cfg.geometry.wavelength == 532e-9);
    CHECK(cfg.geometry.pitch == 5.86e-6);
    CHECK(cfg.geometry.frame_interval == 500e-6);
    CHECK(cfg.geometry.pad_factor == 2);
    CHECK(cfg.masks.type == "partition");
    CHECK(cfg.analysis.window == 21);
    CHECK(cfg.analysis.reject_threshold == 0.5);
    CHECK(cfg.analysis.max_jump == 3e-3);
    CHECK(cfg.solver.lambda_spatial == -1.0); // auto
}

TEST_CASE("round trip through JSON text") {
    const std::string text = R"({
        "seed": 77,
        "output_dir": "run1",
        "geometry": {"nx": 64, "ny": 48, "depths_m": [0.06, 0.08], "frame_count": 10,
                     "frame_interval_s": 5e-5, "pitch_m": 2e-5},
        "masks": {"type": "bernoulli", "superpixel": 8, "density": 0.2},
        "scene": {"preset": "particles", "particle_count": 5},
        "solver": {"lambda_spatial": 0.25, "max_iters": 33},
        "analysis": {"profile_pixels": [[3, 4], [10, 20]]},
        "benchmark": {"fractions": [1.0, 0.1], "dz_m": [0.005], "single_cell": {"fraction": 0.1, "dz_m": 0.005}}
    })";
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.seed == 77);
    CHECK(cfg.output_dir == "run1");
    CHECK(cfg.geometry.nx == 64);
    CHECK(cfg.geometry.ny == 48);
    CHECK(cfg.geometry.depths == std::vector<double>{0.06, 0.08});
    CHECK(cfg.geometry.frame_count == 10);
    CHECK(cfg.masks.type == "bernoulli");
    CHECK(cfg.masks.superpixel == 8);
    CHECK(cfg.scene.preset == "particles");
    CHECK(cfg.solver.lambda_spatial == 0.25);
    CHECK(cfg.solver.max_iters == 33);
    REQUIRE(cfg.analysis.profile_pixels.size() == 2);
    CHECK(cfg.analysis.profile_pixels[1] == std::pair<int, int>{10, 20});
    REQUIRE(cfg.benchmark.single_cell.has_value());
    CHECK(cfg.benchmark.single_cell->first == 0.1);
    // solver_config copies through
    const SolverConfig sc = cfg.solver_config();
    CHECK(sc.lambda_spatial == 0.25);
    CHECK(sc.max_iters == 33);
}

TEST_CASE("bad configs are usage errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{nope"), InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"geometry": {"nx": "wide"}})"),
                    InvalidArgument);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"masks": {"type": "plaid"}})"),
                    InvalidArgument);
    CHECK_THROWS_AS(
        ExperimentConfig::from_json_text(R"({"reconstruct": {"method": "psi"}})"),
        InvalidArgument);
}

TEST_CASE("config hash tracks content") {
    ExperimentConfig a, b;
    CHECK(config_hash_hex(a) == config_hash_hex(b));
    b.seed = 2;
    CHECK(config_hash_hex(a) != config_hash_hex(b));
    b = a;
    b.solver.max_iters += 1;
    CHECK(config_hash_hex(a) != config_hash_hex(b));
}

} // TEST_SUITE

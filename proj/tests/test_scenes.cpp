#include <doctest.h>

#include <cmath>

#include "chv/errors.hpp"
#include "chv/scenes.hpp"
#include "chv/solver.hpp"
#include "support/oracles.hpp"

using namespace chv;

namespace {

Geometry geometry_for(const SceneSpec& spec) {
    Geometry g;
    g.nx = spec.nx;
    g.ny = spec.ny;
    g.pitch = spec.pitch;
    g.wavelength = 532e-9;
    g.depths = spec.depths;
    g.frame_count = spec.frame_count;
    g.frame_interval = spec.frame_interval;
    return g;
}

} // namespace

TEST_SUITE("scenes") {

TEST_CASE("empty spec rasterizes to the zero volume") {
    SceneSpec spec;
    spec.nx = spec.ny = 32;
    spec.pitch = 10e-6;
    spec.depths = {0.01};
    spec.frame_count = 2;
    spec.frame_interval = 1e-4;
    const Object4D o = build_scene(spec);
    for (const auto& z : o.data) CHECK(z == cdouble{0.0, 0.0});
}

TEST_CASE("moving particle centroids land exactly on the rounded trajectory") {
    SceneSpec spec;
    spec.kind = SceneKind::moving_particles;
    spec.nx = spec.ny = 64;
    spec.pitch = 20e-6;
    spec.depths = {0.06};
    spec.frame_count = 5;
    spec.frame_interval = 5e-5;

    SceneObject p;
    p.shape = ObjectShape::disk;
    p.amplitude = 0.1;
    p.x0 = -10 * spec.pitch;
    p.y0 = 4 * spec.pitch;
    p.vx = 3 * spec.pitch / spec.frame_interval; // 3 px per frame
    p.vy = -2 * spec.pitch / spec.frame_interval;
    p.size = 3 * spec.pitch;
    spec.objects = {p};

    const Object4D o = build_scene(spec);
    for (int t = 0; t < spec.frame_count; ++t) {
        double wsum = 0.0, xsum = 0.0, ysum = 0.0;
        const cdouble* s = o.slice(t, 0);
        for (int iy = 0; iy < 64; ++iy)
            for (int ix = 0; ix < 64; ++ix) {
                const double w = std::abs(s[64 * iy + ix]);
                wsum += w;
                xsum += w * ix;
                ysum += w * iy;
            }
        REQUIRE(wsum > 0.0);
        const double want_x = 32 + std::lround(p.x0 / spec.pitch) + 3 * t;
        const double want_y = 32 + std::lround(p.y0 / spec.pitch) - 2 * t;
        CHECK(xsum / wsum == doctest::Approx(want_x).epsilon(1e-12));
        CHECK(ysum / wsum == doctest::Approx(want_y).epsilon(1e-12));
    }
}

TEST_CASE("objects leaving the grid are rejected") {
    SceneSpec spec;
    spec.nx = spec.ny = 32;
    spec.pitch = 10e-6;
    spec.depths = {0.01};
    spec.frame_count = 4;
    spec.frame_interval = 1e-4;
    SceneObject p;
    p.x0 = 14 * spec.pitch; // starts near the edge
    p.vx = 2 * spec.pitch / spec.frame_interval;
    p.size = 3 * spec.pitch;
    p.amplitude = 0.5;
    spec.objects = {p};
    CHECK_THROWS_AS(build_scene(spec), InvalidArgument);
}

TEST_CASE("two-plane preset reproduces the simulation geometry") {
    // 256 px covering a 9.85 mm scene, first layer 70 mm from the sensor
    const double pitch = 9.85e-3 / 256;
    const SceneSpec spec = preset_two_plane(256, 256, pitch, {0.07, 0.085}, 1, 500e-6);
    CHECK(spec.objects.size() >= 2);
    bool near_plane = false, far_plane = false;
    for (const auto& ob : spec.objects) {
        CHECK(ob.amplitude > 0.0);
        CHECK(ob.amplitude <= 1.0);
        if (ob.depth_index == 0) near_plane = true;
        if (ob.depth_index == 1) far_plane = true;
    }
    CHECK(near_plane);
    CHECK(far_plane);
    CHECK_NOTHROW(build_scene(spec));
}

TEST_CASE("zero object and no noise give raw identical to background") {
    SceneSpec spec;
    spec.nx = spec.ny = 32;
    spec.pitch = 10e-6;
    spec.depths = {0.01, 0.02};
    spec.frame_count = 3;
    spec.frame_interval = 1e-4;
    const Geometry g = geometry_for(spec);
    const MaskStack m = generate_partition_masks(32, 32, 3, 4, 5);
    const auto [raw, bg] = simulate_capture(build_scene(spec), m, g, NoiseSpec{});
    CHECK(raw.kind == HologramKind::raw);
    CHECK(bg.kind == HologramKind::background);
    for (std::size_t i = 0; i < raw.data.size(); ++i) CHECK(raw.data[i] == bg.data[i]);
}

TEST_CASE("dropped quadratic term is small for a dim point scatterer") {
    SceneSpec spec;
    spec.nx = spec.ny = 64;
    spec.pitch = 5.86e-6;
    spec.depths = {0.005};
    spec.frame_count = 1;
    spec.frame_interval = 500e-6;
    SceneObject p;
    p.amplitude = 0.05;
    p.size = 2 * spec.pitch;
    spec.objects = {p};
    const Geometry g = geometry_for(spec);
    const MaskStack m = generate_partition_masks(64, 64, 1, 1, 0);

    const Object4D truth = build_scene(spec);
    const auto [raw, bg] = simulate_capture(truth, m, g, NoiseSpec{});
    const Hologram sub = subtract_background(raw, bg);
    const Hologram lin = forward(truth, m, g);

    double resid = 0.0, signal = 0.0;
    for (std::size_t i = 0; i < sub.data.size(); ++i) {
        const double r = sub.data[i] - lin.data[i];
        resid += r * r;
        signal += lin.data[i] * lin.data[i];
    }
    CHECK(resid / signal < 0.005);
}

TEST_CASE("background equals tau times the per-frame masked reference intensity") {
    SceneSpec spec;
    spec.nx = spec.ny = 32;
    spec.pitch = 10e-6;
    spec.depths = {0.01};
    spec.frame_count = 4;
    spec.frame_interval = 2e-4;
    const Geometry g = geometry_for(spec);
    const MaskStack m = generate_partition_masks(32, 32, 4, 4, 9);
    const auto [raw, bg] = simulate_capture(build_scene(spec), m, g, NoiseSpec{});

    // identity sensor leg: per-frame reference intensity is the mask itself
    for (int iy = 0; iy < 32; ++iy)
        for (int ix = 0; ix < 32; ++ix) {
            int open = 0;
            for (int t = 0; t < 4; ++t) open += m.frames[static_cast<std::size_t>(t)][32 * iy + ix];
            CHECK(bg.at(iy, ix) ==
                  doctest::Approx(g.frame_interval * open).epsilon(1e-12));
            if (open > 0) CHECK(bg.at(iy, ix) > 0.0);
        }
}

TEST_CASE("capture is deterministic, and the noise stream follows the seed") {
    SceneSpec spec;
    spec.nx = spec.ny = 32;
    spec.pitch = 10e-6;
    spec.depths = {0.01};
    spec.frame_count = 2;
    spec.frame_interval = 1e-4;
    SceneObject p;
    p.amplitude = 0.1;
    p.size = 3 * spec.pitch;
    spec.objects = {p};
    const Geometry g = geometry_for(spec);
    const MaskStack m = generate_partition_masks(32, 32, 2, 4, 1);
    const Object4D truth = build_scene(spec);

    NoiseSpec noisy;
    noisy.model = NoiseSpec::Model::gaussian;
    noisy.sigma = 0.01;
    noisy.seed = 42;
    const auto [r1, b1] = simulate_capture(truth, m, g, noisy);
    const auto [r2, b2] = simulate_capture(truth, m, g, noisy);
    CHECK(r1.data == r2.data);
    CHECK(b1.data == b2.data);

    noisy.seed = 43;
    const auto [r3, b3] = simulate_capture(truth, m, g, noisy);
    CHECK(r1.data != r3.data);
    // raw and background draw independent noise
    bool all_same = true;
    for (std::size_t i = 0; i < r1.data.size(); ++i)
        if (r1.data[i] - b1.data[i] != 0.0) all_same = false;
    CHECK_FALSE(all_same);
}

TEST_CASE("psnr formula cases") {
    Object4D truth(1, 1, 4, 4), recon(1, 1, 4, 4);
    for (auto& z : truth.data) z = 1.0;

    SUBCASE("identical volumes hit the cap") {
        CHECK(psnr(truth, truth) == 300.0);
    }
    SUBCASE("all-ones truth vs zero recon is 0 dB") {
        CHECK(psnr(recon, truth) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("peak 2, uniform error 0.1") {
        Object4D t2(1, 1, 4, 4), r2(1, 1, 4, 4);
        for (std::size_t i = 0; i < t2.size(); ++i) {
            t2.data[i] = (i == 0) ? 2.0 : 1.0;
            r2.data[i] = t2.data[i] + 0.1;
        }
        CHECK(psnr(r2, t2) == doctest::Approx(26.0206).epsilon(1e-4));
    }
    SUBCASE("joint positive scaling leaves PSNR unchanged") {
        Object4D t2 = truth, r2 = recon;
        for (std::size_t i = 0; i < t2.size(); ++i) r2.data[i] = cdouble{0.3, 0.1} * double(i);
        const double base = psnr(r2, t2);
        for (std::size_t i = 0; i < t2.size(); ++i) {
            t2.data[i] *= 7.5;
            r2.data[i] *= 7.5;
        }
        CHECK(psnr(r2, t2) == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("shape mismatch throws") {
        Object4D small(1, 1, 2, 2);
        CHECK_THROWS_AS(psnr(small, truth), DimensionMismatch);
    }
}

TEST_CASE("fitted PSNR undoes a global gain") {
    Object4D truth(1, 1, 8, 8), recon(1, 1, 8, 8);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        truth.data[i] = 0.1 * double((i * 7) % 5);
        recon.data[i] = truth.data[i] * 37.0; // same shape, wild scale
    }
    CHECK(psnr_fitted(recon, truth) == 300.0);
}

} // TEST_SUITE

#include "chv/solver.hpp"

#include <chrono>
#include <cmath>

#include "chv/csv.hpp"
#include "chv/errors.hpp"
#include "chv/parallel.hpp"

namespace chv {

namespace {

double data_fit(const Hologram& g, const Hologram& ag) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        const double r = g.data[i] - ag.data[i];
        s += r * r;
    }
    return 0.5 * s;
}

Hologram residual(const Hologram& g, const Hologram& ag) {
    Hologram r = g;
    for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] -= ag.data[i];
    return r;
}

double reference_lambda(const SolverConfig& cfg) {
    return cfg.lambda_spatial > 0.0 ? cfg.lambda_spatial : cfg.lambda_temporal;
}

} // namespace

void SolverConfig::validate() const {
    if (lambda_spatial < 0.0 || lambda_temporal < 0.0)
        throw InvalidArgument("SolverConfig: regularization weights must be >= 0");
    if (max_iters < 1) throw InvalidArgument("SolverConfig: max_iters must be >= 1");
    if (!(tol > 0.0)) throw InvalidArgument("SolverConfig: tol must be > 0");
    if (tv_inner_iters < 1) throw InvalidArgument("SolverConfig: tv_inner_iters must be >= 1");
    if (norm_iterations < 1) throw InvalidArgument("SolverConfig: norm_iterations must be >= 1");
    if (!(spectral_floor > 0.0) || spectral_floor > 1.0)
        throw InvalidArgument("SolverConfig: spectral_floor must be in (0, 1]");
}

void write_trace_csv(const SolveTrace& trace, const std::string& path) {
    CsvWriter csv(path, {"iteration", "data_fit", "tv", "objective", "time_ms"});
    for (const auto& r : trace.records)
        csv.row({format_int(r.iteration), format_double(r.data_fit), format_double(r.tv),
                 format_double(r.objective), format_double(r.time_ms)});
    csv.close();
}

std::pair<Object4D, SolveTrace> twist_reconstruct(const Hologram& g, const MaskStack& masks,
                                                  const Geometry& geom, const SolverConfig& cfg,
                                                  const Object4D* init) {
    SensingOperator op(geom, masks);
    return twist_reconstruct(op, g, cfg, init);
}

std::pair<Object4D, SolveTrace> twist_reconstruct(const SensingOperator& op, const Hologram& g,
                                                  const SolverConfig& cfg, const Object4D* init) {
    cfg.validate();
    if (g.kind != HologramKind::subtracted)
        throw InvalidArgument("twist_reconstruct: hologram must be background-subtracted");
    const Geometry& geom = op.geometry();
    if (g.nx != geom.nx || g.ny != geom.ny)
        throw DimensionMismatch("twist_reconstruct: hologram grid does not match geometry");

    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         t_start)
            .count();
    };

    SolveTrace trace;
    trace.operator_norm = operator_norm_estimate(op, cfg.norm_iterations, cfg.norm_seed);
    double c = trace.operator_norm * trace.operator_norm;
    if (!(c > 0.0)) c = 1.0;
    trace.step_scale_c = c;

    const double lambda = reference_lambda(cfg);
    trace.lambda_used = lambda;

    // Two-step coefficients from the assumed spectral range
    // [spectral_floor, 1] of A^T A / c.
    double alpha = cfg.twist_alpha, beta = cfg.twist_beta;
    if (alpha <= 0.0 || beta <= 0.0) {
        const double xi1 = cfg.spectral_floor;
        const double rho = (1.0 - xi1) / (1.0 + xi1);
        alpha = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
        beta = 2.0 * alpha / (1.0 + xi1);
    }
    trace.alpha = alpha;
    trace.beta = beta;

    Object4D o = init ? *init : Object4D::like(geom);
    if (init && !o.same_shape(Object4D::like(geom)))
        throw DimensionMismatch("twist_reconstruct: init shape does not match geometry");
    Object4D o_prev = o;

    Hologram a_o = op.forward(o);
    double fit = data_fit(g, a_o);
    double tv = tv_norm(o, cfg);
    double objective = fit + lambda * tv;
    trace.records.push_back({0, fit, tv, objective, 0.0, elapsed_ms()});

    auto evaluate = [&](const Object4D& cand, Hologram& a_cand, double& fit_cand,
                        double& tv_cand) {
        a_cand = op.forward(cand);
        fit_cand = data_fit(g, a_cand);
        tv_cand = tv_norm(cand, cfg);
        return fit_cand + lambda * tv_cand;
    };

    const double obj0 = objective;
    int consecutive_stalls = 0;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        // Gradient step u = o + A^T(g - A o) / c, then denoise.
        Object4D u = op.adjoint(residual(g, a_o));
        for (std::size_t i = 0; i < u.size(); ++i) u.data[i] = o.data[i] + u.data[i] / c;
        Object4D d = tv_denoise(u, lambda / c, cfg);
        if (cfg.project_real)
            for (auto& z : d.data) z = cdouble{z.real(), 0.0};

        Object4D cand = d;
        if (k > 1) {
            for (std::size_t i = 0; i < cand.size(); ++i)
                cand.data[i] = (1.0 - alpha) * o_prev.data[i] + (alpha - beta) * o.data[i] +
                               beta * d.data[i];
            if (cfg.project_real)
                for (auto& z : cand.data) z = cdouble{z.real(), 0.0};
        }

        Hologram a_cand;
        double fit_cand, tv_cand;
        double obj_cand = evaluate(cand, a_cand, fit_cand, tv_cand);

        if (cfg.enforce_monotone && obj_cand > objective && k > 1) {
            // Two-step overshoot: retry with the plain IST update.
            cand = d;
            obj_cand = evaluate(cand, a_cand, fit_cand, tv_cand);
        }
        if (cfg.enforce_monotone && obj_cand > objective) {
            // Even IST increased: the step scale is too optimistic.
            // Stay put and shrink the step for the next sweep.
            c *= 2.0;
            trace.step_scale_c = c;
            ++trace.stalls;
            ++consecutive_stalls;
            trace.records.push_back({k, fit, tv, objective, 0.0, elapsed_ms()});
            if (consecutive_stalls >= 3) break;
            continue;
        }
        consecutive_stalls = 0;

        if (!std::isfinite(obj_cand) || !all_finite(cand.data)) {
            // Abort with the diagnostic trace intact; the last finite
            // iterate is returned and trace.aborted tells the caller.
            trace.aborted = true;
            break;
        }

        double step = 0.0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const cdouble dz = cand.data[i] - o.data[i];
            step += std::norm(dz);
        }
        step = std::sqrt(step);

        o_prev = std::move(o);
        o = std::move(cand);
        a_o = std::move(a_cand);
        const double obj_before = objective;
        fit = fit_cand;
        tv = tv_cand;
        objective = obj_cand;
        trace.records.push_back({k, fit, tv, objective, step, elapsed_ms()});

        const double denom = std::max(std::abs(obj_before), 1e-300);
        if (std::abs(obj_before - objective) / denom < cfg.tol ||
            (obj0 == 0.0 && objective == 0.0)) {
            trace.converged = true;
            break;
        }
    }
    return {std::move(o), std::move(trace)};
}

double default_lambda(const SensingOperator& op, const Hologram& g) {
    Object4D atg = op.adjoint(g);
    double peak = 0.0;
    for (const auto& z : atg.data) peak = std::max(peak, std::abs(z));
    return 0.01 * peak;
}

Object4D backpropagate(const Hologram& g, const Geometry& geom) {
    geom.validate();
    if (g.kind != HologramKind::subtracted)
        throw InvalidArgument("backpropagate: hologram must be background-subtracted");
    if (g.nx != geom.nx || g.ny != geom.ny)
        throw DimensionMismatch("backpropagate: hologram grid does not match geometry");

    ComplexField gc(geom.nx, geom.ny, geom.pitch);
    const double scale = 1.0 / (2.0 * geom.frame_interval);
    for (std::size_t i = 0; i < gc.data.size(); ++i)
        gc.data[i] = cdouble{g.data[i] * scale, 0.0};

    Object4D out = Object4D::like(geom);
    parallel_for(static_cast<std::size_t>(geom.depth_count()), [&](std::size_t n) {
        const double dist = geom.depths[n] + geom.observation_to_mask + geom.mask_to_sensor;
        TransferFunction tf = make_transfer(geom.nx, geom.ny, geom.pitch, geom.wavelength, -dist,
                                            geom.pad_factor);
        ComplexField slice = propagate(gc, tf);
        for (int t = 0; t < geom.frame_count; ++t) {
            cdouble* dst = out.slice(t, static_cast<int>(n));
            for (std::size_t i = 0; i < slice.data.size(); ++i) dst[i] = slice.data[i];
        }
    });
    return out;
}

Object4D backpropagate(const Hologram& g, const MaskStack& masks, const Geometry& geom) {
    geom.validate();
    if (g.kind != HologramKind::subtracted)
        throw InvalidArgument("backpropagate: hologram must be background-subtracted");
    if (g.nx != geom.nx || g.ny != geom.ny || masks.nx != geom.nx || masks.ny != geom.ny)
        throw DimensionMismatch("backpropagate: grid mismatch");
    if (masks.frame_count() != geom.frame_count)
        throw DimensionMismatch("backpropagate: mask frame count != geometry frame count");

    Object4D out = Object4D::like(geom);
    parallel_for(static_cast<std::size_t>(geom.frame_count), [&](std::size_t t) {
        const auto& m = masks.frames[t];
        const double density = std::max(masks.density(static_cast<int>(t)), 1e-12);
        const double scale = 1.0 / (2.0 * geom.frame_interval * density);
        ComplexField gc(geom.nx, geom.ny, geom.pitch);
        for (std::size_t i = 0; i < gc.data.size(); ++i)
            gc.data[i] = m[i] ? cdouble{g.data[i] * scale, 0.0} : cdouble{0.0, 0.0};
        for (int n = 0; n < geom.depth_count(); ++n) {
            const double dist = geom.depths[static_cast<std::size_t>(n)] +
                                geom.observation_to_mask + geom.mask_to_sensor;
            TransferFunction tf = make_transfer(geom.nx, geom.ny, geom.pitch, geom.wavelength,
                                                -dist, geom.pad_factor);
            ComplexField slice = propagate(gc, tf);
            cdouble* dst = out.slice(static_cast<int>(t), n);
            for (std::size_t i = 0; i < slice.data.size(); ++i) dst[i] = slice.data[i];
        }
    });
    return out;
}

} // namespace chv

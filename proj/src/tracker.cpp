#include "ibrt/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ibrt/deriv.hpp"
#include "ibrt/error.hpp"
#include "ibrt/numerics.hpp"

namespace ibrt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxExponent = 700.0;

std::size_t support_size(const DecoderRoot& r) {
    return static_cast<std::size_t>(std::count_if(r.marginal.begin(), r.marginal.end(), [](double m) { return m > 0.0; }));
}

BAResult merge_fastest_pair(const IBProblem& prob, const DecoderRoot& root, const Vector& v, double beta_next,
                            const TrackerConfig& cfg) {
    const std::size_t T = root.clusters();
    if (T < 2) throw CannotReduce("singularity handling needs at least two clusters");
    const LogLayout L{T, root.ny()};
    if (v.size() != L.size()) throw ShapeError("handle_singularity: derivative has the wrong length");

    Vector speed(T, 0.0);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t y = 0; y < L.ny; ++y) speed[t] = std::max(speed[t], std::abs(v[L.dec(y, t)]));
    std::vector<std::size_t> order(T);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return speed[a] > speed[b]; });
    const std::size_t keep = std::min(order[0], order[1]);
    const std::size_t drop = std::max(order[0], order[1]);

    DecoderRoot merged{Matrix(L.ny, T - 1), Vector(T - 1), beta_next};
    for (std::size_t t = 0, k = 0; t < T; ++t) {
        if (t == drop) continue;
        for (std::size_t y = 0; y < L.ny; ++y)
            merged.decoders(y, k) = t == keep ? 0.5 * (root.decoders(y, keep) + root.decoders(y, drop)) : root.decoders(y, t);
        merged.marginal[k] = t == keep ? root.marginal[keep] + root.marginal[drop] : root.marginal[t];
        ++k;
    }
    const Encoder enc = encoder_from_decoder(merged, prob, beta_next).encoder;
    return ba_iterate(enc, prob, beta_next, cfg.ba_stop, cfg.ba_max_iter);
}

}  // namespace

void TrackerConfig::validate() const {
    if (!(delta_beta < 0.0)) throw InputError("delta_beta must be negative");
    auto unit = [](double d) { return d > 0.0 && d < 1.0; };
    if (!unit(delta1) || !unit(delta2) || !unit(delta3)) throw InputError("thresholds must lie in (0, 1)");
    if (!(ba_stop > 0.0)) throw InputError("ba_stop must be positive");
    if (ba_max_iter < 1) throw InputError("ba_max_iter must be at least 1");
    if (!(beta_min >= 0.0)) throw InputError("beta_min must be non-negative");
}

std::string to_string(TrackEvent e) {
    switch (e) {
        case TrackEvent::none: return "none";
        case TrackEvent::reduced: return "reduced";
        case TrackEvent::singularity_handled: return "singularity_handled";
        case TrackEvent::converged_trivial: return "converged_trivial";
    }
    return "unknown";
}

InfoPoint root_info(const DecoderRoot& root, const IBProblem& prob, double beta) {
    return mutual_informations(encoder_from_decoder(root, prob, beta).encoder, prob);
}

DecoderRoot euler_step(const DecoderRoot& root, const Vector& v, double delta_beta) {
    if (delta_beta == 0.0) return root;
    const LogLayout L{root.clusters(), root.ny()};
    if (v.size() != L.size()) throw ShapeError("euler_step: derivative has the wrong length");
    Vector z = to_log_coords(root);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double inc = delta_beta * v[i];
        if (!std::isfinite(inc) || std::abs(inc) > kMaxExponent)
            throw StepTooLarge("euler_step: exponent " + std::to_string(inc) + " is out of range");
        z[i] += inc;
    }
    DecoderRoot out = from_log_coords(z, L, root.beta);
    for (std::size_t t = 0; t < L.clusters; ++t) {
        double s = 0.0;
        for (std::size_t y = 0; y < L.ny; ++y) s += out.decoders(y, t);
        for (std::size_t y = 0; y < L.ny; ++y) out.decoders(y, t) /= s;
    }
    const double m = std::accumulate(out.marginal.begin(), out.marginal.end(), 0.0);
    for (double& x : out.marginal) x /= m;
    return out;
}

DecoderRoot euler_step(const DecoderRoot& root, const OdeSolution& v, double delta_beta) {
    return euler_step(root, v.v, delta_beta);
}

DecoderRoot handle_singularity(const IBProblem& prob, const DecoderRoot& root, const OdeSolution& v,
                               double beta_next, const TrackerConfig& cfg) {
    return merge_fastest_pair(prob, root, v.v, beta_next, cfg).root;
}

std::vector<TrackRecord> ibrt1(const IBProblem& prob, double beta0, const DecoderRoot& root0,
                               const TrackerConfig& cfg) {
    cfg.validate();
    if (!(beta0 > 0.0)) throw InputError("beta0 must be positive");
    root0.validate();
    const double step = cfg.delta_beta;
    const double eps = 1e-12 * std::max(1.0, beta0);

    std::vector<TrackRecord> out;
    double beta = beta0;
    DecoderRoot cur = root0;
    cur.beta = beta;
    TrackEvent event = TrackEvent::none;
    bool unconverged = false;

    while (beta > std::abs(step) && support_size(cur) > 1 && beta + step >= cfg.beta_min - eps) {
        TrackRecord rec{beta, cur, root_info(cur, prob, beta), event, kNaN, kNaN, {}, unconverged};
        event = TrackEvent::none;
        unconverged = false;
        const double next = beta + step;

        if (cfg.euler_predictor || cfg.singularity_check) {
            OdeSolution sol;
            bool solved = true;
            try {
                sol = solve_ib_ode_unguarded(cur, prob, beta);
            } catch (const SingularMatrix&) {
                solved = false;
                const Matrix s = s_matrix(cur, prob, beta);
                sol.singular_metric = sigma_min(Matrix::identity(s.rows()) - s);
                sol.v.assign(LogLayout{cur.clusters(), cur.ny()}.size(), 0.0);
                sol.condition = std::numeric_limits<double>::infinity();
            }
            rec.ode_condition = sol.condition;
            rec.singular_metric = sol.singular_metric;
            if (solved) rec.derivative = sol.v;

            if (cfg.singularity_check && sol.singular_metric < cfg.delta3) {
                const BAResult ba = merge_fastest_pair(prob, cur, sol.v, next, cfg);
                cur = ba.root;
                event = TrackEvent::singularity_handled;
                unconverged = !ba.converged;
            } else if (cfg.euler_predictor) {
                if (!solved) throw SingularMatrix(0, "IB ODE is singular and the singularity check is off");
                cur = euler_step(cur, sol, step);
                if (cfg.reduce) {
                    const std::size_t before = cur.clusters();
                    ReductionReport rep = reduce_root(cur, cfg.delta1, cfg.delta2);
                    if (rep.root.clusters() != before) {
                        const Encoder enc = encoder_from_decoder(rep.root, prob, next).encoder;
                        const BAResult ba = ba_iterate(enc, prob, next, cfg.ba_stop, cfg.ba_max_iter);
                        cur = ba.root;
                        event = TrackEvent::reduced;
                        unconverged = !ba.converged;
                    }
                }
            }
        }
        out.push_back(std::move(rec));

        beta = next;
        cur.beta = beta;
        for (std::size_t k = 0; k < cfg.corrector_steps; ++k) cur = ba_step_decoder(cur, prob, beta);
    }

    TrackRecord last{beta, cur, root_info(cur, prob, beta), event, kNaN, kNaN, {}, unconverged};
    if (support_size(cur) <= 1 && event == TrackEvent::none) last.event = TrackEvent::converged_trivial;
    try {
        const OdeSolution sol = solve_ib_ode_unguarded(cur, prob, beta);
        last.ode_condition = sol.condition;
        last.singular_metric = sol.singular_metric;
        last.derivative = sol.v;
    } catch (const Error&) {
        // Metrics stay NaN at a point where the ODE cannot be evaluated.
    }
    out.push_back(std::move(last));
    return out;
}

DecoderRoot interpolate_offgrid(const TrackRecord& record, const OdeSolution& v, double beta_target,
                                double delta_beta) {
    const double gap = beta_target - record.beta;
    if (std::abs(gap) > std::abs(delta_beta) * (1.0 + 1e-12))
        throw RangeError("interpolate_offgrid: target beta lies outside the grid bracket");
    DecoderRoot r = euler_step(record.root, v, gap);
    r.beta = beta_target;
    return r;
}

}  // namespace ibrt

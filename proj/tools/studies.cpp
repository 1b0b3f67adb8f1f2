#include "studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "ibrt/deriv.hpp"
#include "ibrt/error.hpp"
#include "ibrt/numerics.hpp"
#include "ibrt/ode.hpp"
#include "ibrt/oracles.hpp"
#include "ibrt/problem_io.hpp"
#include "ibrt/reduction.hpp"

namespace ibrt::tools {

namespace {

constexpr double kReferenceStop = 1e-13;
constexpr std::size_t kReferenceMaxIter = 2000000;

double parse_real(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError(what + ": '" + s + "' is not a number");
    }
    if (used != s.size()) throw InputError(what + ": trailing characters in '" + s + "'");
    return v;
}

DecoderRoot trivial_root(const IBProblem& prob, std::size_t clusters, double beta) {
    const Vector py = prob.p_y();
    DecoderRoot r{Matrix(prob.ny(), clusters), Vector(clusters, 1.0 / static_cast<double>(clusters)), beta};
    for (std::size_t t = 0; t < clusters; ++t)
        for (std::size_t y = 0; y < prob.ny(); ++y) r.decoders(y, t) = py[y];
    return r;
}

Encoder encoder_at(const DecoderRoot& root, const IBProblem& prob, double beta) {
    return encoder_from_decoder(root, prob, beta).encoder;
}

}  // namespace

ProblemSpec resolve_problem(const std::string& id) {
    if (id.rfind("bsc:", 0) == 0) {
        const double alpha = parse_real(id.substr(4), "bsc crossover");
        if (!(alpha > 0.0 && alpha < 0.5)) throw RangeError("bsc crossover must lie in (0, 1/2)");
        return ProblemSpec{id, bsc_problem(alpha), alpha, false};
    }
    if (id == "decomposable") return ProblemSpec{id, decomposable_problem(), std::nullopt, true};
    return ProblemSpec{id, load_problem_file(id), std::nullopt, false};
}

std::size_t thread_cap() {
    if (const char* env = std::getenv("IBRT_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> descending_grid(double beta0, double beta_end, std::size_t points) {
    if (points == 0) throw InputError("grid must have at least one point");
    if (!(beta0 >= beta_end)) throw InputError("grid must run from the larger beta down");
    if (points == 1) return {beta0};
    std::vector<double> g(points);
    const double h = (beta0 - beta_end) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = beta0 - h * static_cast<double>(i);
    g.back() = beta_end;
    return g;
}

double encoder_distance(const Encoder& a, const Encoder& b) {
    const std::size_t T = std::max(a.clusters(), b.clusters());
    const std::size_t nx = a.p.cols();
    if (b.p.cols() != nx) throw ShapeError("encoder_distance: |X| differs");
    auto entry = [](const Encoder& e, std::size_t t, std::size_t x) { return t < e.clusters() ? e.p(t, x) : 0.0; };
    std::vector<std::size_t> perm(T);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double d = 0.0;
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t x = 0; x < nx; ++x) d = std::max(d, std::abs(entry(a, t, x) - entry(b, perm[t], x)));
        best = std::min(best, d);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

DecoderRoot initial_root(const ProblemSpec& spec, double beta, std::size_t clusters, const TrackerConfig& cfg) {
    if (spec.bsc_alpha) {
        const BscSolution s = bsc_exact_root(*spec.bsc_alpha, beta);
        return reduce_root(s.root, cfg.delta1, cfg.delta2).root;
    }
    if (clusters == 0) throw InputError("cluster count must be positive");
    const BAResult ba = ba_iterate(uniform_encoder(clusters, spec.problem.nx()), spec.problem, beta, kReferenceStop,
                                   kReferenceMaxIter);
    DecoderRoot r = reduce_root(ba.root, cfg.delta1, cfg.delta2).root;
    r.beta = beta;
    return r;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InputError("fit_line: x values coincide");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

std::vector<OrderMethod> default_order_methods() {
    return {{"euler", 0, true}, {"euler_ba1", 1, true}, {"anneal", 1, false}};
}

OrderStudy order_study(const ProblemSpec& spec, double beta0, double beta_end, const std::vector<double>& steps,
                       const std::vector<OrderMethod>& methods, std::size_t clusters, std::size_t fit_points,
                       std::size_t threads) {
    if (steps.empty() || methods.empty()) throw InputError("order study needs steps and methods");
    if (!(beta0 > beta_end && beta_end > 0.0)) throw InputError("order study needs beta0 > beta_end > 0");
    for (double s : steps)
        if (!(s > 0.0)) throw InputError("order study steps are magnitudes and must be positive");

    const TrackerConfig base;
    const DecoderRoot root0 = initial_root(spec, beta0, clusters, base);
    const IBProblem& prob = spec.problem;
    const bool oracle = spec.bsc_alpha.has_value();

    std::vector<double> sorted(steps);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    OrderStudy study;
    study.reference = oracle ? "oracle" : "ba";
    study.points.resize(sorted.size() * methods.size());
    std::vector<std::exception_ptr> failures(study.points.size());

    auto run = [&](std::size_t k) {
        const double step = sorted[k / methods.size()];
        const OrderMethod& m = methods[k % methods.size()];
        TrackerConfig cfg;
        cfg.delta_beta = -step;
        cfg.corrector_steps = m.corrector_steps;
        cfg.euler_predictor = m.euler_predictor;
        cfg.singularity_check = false;
        cfg.reduce = false;
        cfg.beta_min = beta_end;
        const auto recs = ibrt1(prob, beta0, root0, cfg);
        double sup = 0.0;
        for (const auto& r : recs) {
            const Encoder approx = encoder_at(r.root, prob, r.beta);
            Encoder exact;
            if (oracle) {
                exact = bsc_exact_root(*spec.bsc_alpha, r.beta).encoder;
            } else {
                exact = ba_iterate(approx, prob, r.beta, kReferenceStop, kReferenceMaxIter).encoder;
            }
            sup = std::max(sup, encoder_distance(approx, exact));
        }
        study.points[k] = OrderPoint{step, m.name, sup, recs.size()};
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, study.points.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < study.points.size();) {
            try {
                run(k);
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    const std::size_t use = std::min(std::max<std::size_t>(fit_points, 2), sorted.size());
    if (sorted.size() >= 2) {
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            std::vector<double> lx, ly;
            for (std::size_t si = sorted.size() - use; si < sorted.size(); ++si) {
                const OrderPoint& p = study.points[si * methods.size() + mi];
                if (!(p.sup_error > 0.0)) continue;
                lx.push_back(std::log10(p.step));
                ly.push_back(std::log10(p.sup_error));
            }
            OrderFit f{methods[mi].name, {}, lx.size()};
            if (lx.size() >= 2) f.fit = fit_line(lx, ly);
            else f.fit = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0.0};
            study.fits.push_back(f);
        }
    }
    return study;
}

std::vector<DerivCheckRow> deriv_check(const ProblemSpec& spec, const std::vector<double>& betas,
                                       std::size_t clusters, double fd_step) {
    if (betas.empty()) throw InputError("beta grid is empty");
    const IBProblem& prob = spec.problem;
    const TrackerConfig cfg;
    std::vector<DerivCheckRow> rows;
    rows.reserve(betas.size());
    for (double beta : betas) {
        if (!(beta > 0.0)) throw InputError("beta must be positive");
        DerivCheckRow row{beta, 0.0, spec.bsc_alpha ? "oracle" : "finite_difference", 0};
        if (spec.bsc_alpha) {
            const BscSolution s = bsc_exact_root(*spec.bsc_alpha, beta);
            const DecoderRoot root = s.trivial() ? reduce_root(s.root, cfg.delta1, cfg.delta2).root : s.root;
            const OdeSolution sol = solve_ib_ode_unguarded(root, prob, beta);
            Vector exact(sol.v.size(), 0.0);
            if (!s.trivial()) exact = bsc_exact_derivative(*spec.bsc_alpha, beta).log_decoder;
            row.error = max_abs_diff(sol.v, exact);
            row.clusters = root.clusters();
        } else {
            const DecoderRoot root = initial_root(spec, beta, clusters, cfg);
            const OdeSolution sol = solve_ib_ode_unguarded(root, prob, beta);
            const Encoder start = encoder_at(root, prob, beta);
            const Vector zp = to_log_coords(ba_iterate(start, prob, beta + fd_step, kReferenceStop, kReferenceMaxIter).root);
            const Vector zm = to_log_coords(ba_iterate(start, prob, beta - fd_step, kReferenceStop, kReferenceMaxIter).root);
            Vector fd(zp.size());
            for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (zp[i] - zm[i]) / (2.0 * fd_step);
            row.error = max_abs_diff(sol.v, fd);
            row.clusters = root.clusters();
        }
        rows.push_back(row);
    }
    return rows;
}

CurveMethod parse_curve_method(const std::string& s) {
    if (s == "track") return CurveMethod::track;
    if (s == "ba_anneal") return CurveMethod::ba_anneal;
    if (s == "oracle") return CurveMethod::oracle;
    throw InputError("unknown curve method '" + s + "'");
}

std::vector<CurvePoint> information_curve(const ProblemSpec& spec, const std::vector<double>& betas,
                                          CurveMethod method, std::size_t clusters, const TrackerConfig& cfg) {
    if (betas.empty()) throw InputError("beta grid is empty");
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) throw InputError("beta values must be positive");
        if (i > 0 && !(betas[i] < betas[i - 1])) throw InputError("beta grid must be strictly descending");
    }
    const IBProblem& prob = spec.problem;
    std::vector<CurvePoint> out;
    out.reserve(betas.size());

    if (method == CurveMethod::oracle) {
        if (!spec.bsc_alpha) throw InputError("no oracle curve for problem '" + spec.id + "'");
        for (double b : betas) {
            const BscSolution s = bsc_exact_root(*spec.bsc_alpha, b);
            out.push_back({b, s.info(), s.trivial() ? std::size_t{1} : std::size_t{2}});
        }
        return out;
    }

    const DecoderRoot root0 = initial_root(spec, betas.front(), clusters, cfg);
    if (method == CurveMethod::ba_anneal) {
        Encoder enc = encoder_at(root0, prob, betas.front());
        for (double b : betas) {
            const BAResult ba = ba_iterate(enc, prob, b, cfg.ba_stop, cfg.ba_max_iter);
            enc = ba.encoder;
            const DecoderRoot reduced = reduce_root(ba.root, cfg.delta1, cfg.delta2).root;
            out.push_back({b, mutual_informations(ba.encoder, prob), reduced.clusters()});
        }
        return out;
    }

    TrackerConfig tc = cfg;
    if (betas.size() > 1) {
        const double h = betas[0] - betas[1];
        for (std::size_t i = 1; i < betas.size(); ++i)
            if (std::abs((betas[i - 1] - betas[i]) - h) > 1e-9 * std::max(1.0, betas.front()))
                throw InputError("the track method needs a uniform grid");
        tc.delta_beta = -h;
        tc.beta_min = betas.back();
    }
    std::vector<TrackRecord> recs;
    if (betas.size() > 1) recs = ibrt1(prob, betas.front(), root0, tc);
    else {
        TrackRecord only;
        only.beta = betas.front();
        only.root = root0;
        only.info = root_info(root0, prob, only.beta);
        recs.push_back(std::move(only));
    }
    const std::size_t n = std::min(recs.size(), betas.size());
    for (std::size_t i = 0; i < n; ++i) out.push_back({betas[i], recs[i].info, recs[i].clusters()});
    Encoder enc = encoder_at(recs[n - 1].root, prob, betas[n - 1]);
    for (std::size_t i = n; i < betas.size(); ++i) {
        const BAResult ba = ba_iterate(enc, prob, betas[i], cfg.ba_stop, cfg.ba_max_iter);
        enc = ba.encoder;
        out.push_back({betas[i], mutual_informations(ba.encoder, prob),
                       reduce_root(ba.root, cfg.delta1, cfg.delta2).root.clusters()});
    }
    return out;
}

std::vector<CurvePoint> oracle_curve_by_ix(const ProblemSpec& spec, const std::vector<double>& i_x) {
    if (i_x.empty()) throw InputError("I_X grid is empty");
    if (!spec.bsc_alpha) throw InputError("no oracle curve for problem '" + spec.id + "'");
    std::vector<CurvePoint> out;
    for (double ix : i_x)
        out.push_back({std::numeric_limits<double>::quiet_NaN(), InfoPoint{ix, mrs_gerber_curve(*spec.bsc_alpha, ix)},
                       0});
    return out;
}

RootSource parse_root_source(const std::string& s) {
    if (s == "oracle") return RootSource::oracle;
    if (s == "trivial") return RootSource::trivial;
    if (s == "ba") return RootSource::ba;
    throw InputError("unknown root source '" + s + "'");
}

std::vector<EigRow> eig_scan(const ProblemSpec& spec, const std::vector<double>& betas, std::size_t clusters,
                             RootSource source) {
    if (clusters == 0) throw InputError("representation size T must be positive");
    if (betas.empty()) throw InputError("beta grid is empty");
    const IBProblem& prob = spec.problem;
    if (source == RootSource::oracle) {
        if (!spec.bsc_alpha) throw InputError("no oracle root for problem '" + spec.id + "'");
        if (clusters != 2) throw InputError("the bsc oracle root has exactly two clusters");
    }
    std::vector<EigRow> rows;
    Encoder warm = uniform_encoder(clusters, prob.nx());
    for (double beta : betas) {
        if (!(beta > 0.0)) throw InputError("beta values must be positive");
        DecoderRoot root;
        switch (source) {
            case RootSource::oracle: root = bsc_exact_root(*spec.bsc_alpha, beta).root; break;
            case RootSource::trivial: root = trivial_root(prob, clusters, beta); break;
            case RootSource::ba: {
                const BAResult ba = ba_iterate(warm, prob, beta, kReferenceStop, kReferenceMaxIter);
                warm = ba.encoder;
                root = ba.root;
                break;
            }
        }
        root.beta = beta;
        const Matrix J = ba_jacobian_log_decoder(root, prob, beta).m;
        const auto ev = eigenvalues(J);
        EigRow row{beta, {}, {}, std::numeric_limits<double>::infinity(), 0.0};
        for (const auto& e : ev) {
            row.eig_re.push_back(e.real());
            row.eig_im.push_back(e.imag());
            row.min_abs_one_minus_eig = std::min(row.min_abs_one_minus_eig, std::abs(1.0 - e));
        }
        const Matrix s = s_matrix(root, prob, beta);
        row.sigma_min_i_minus_s = sigma_min(Matrix::identity(s.rows()) - s);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ibrt::tools

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ibrt/ba.hpp"
#include "ibrt/deriv.hpp"
#include "ibrt/numerics.hpp"
#include "ibrt/ode.hpp"
#include "ibrt/oracles.hpp"
#include "ibrt/reduction.hpp"
#include "ibrt/tracker.hpp"
#include "studies.hpp"

using namespace ibrt;

namespace {

constexpr double kAlpha = 0.3;

// Pinned tolerances and runtime budgets (seconds).
constexpr double kC1Lo = 6.15, kC1Hi = 6.35, kC1Budget = 10.0;
constexpr double kC2Tol = 1e-8, kC2Budget = 1.0;
constexpr double kC3EulerLo = 0.85, kC3EulerHi = 1.15, kC3CorrMin = 1.7, kC3AnnealLo = 0.7, kC3AnnealHi = 1.1;
constexpr double kC3Budget = 60.0;
constexpr double kC4Tol = 2e-3, kC4Budget = 5.0;
constexpr double kC5Gap = 0.05, kC5Window = 0.02, kC5Unit = 1e-2, kC5Budget = 10.0;
constexpr double kC6Rank = 1e-6, kC6Lift = 1e-6, kC6Side = 1e-8, kC6Budget = 5.0;
constexpr double kC7Enc = 1e-6, kC7Cross = 1e-3, kC7Budget = 60.0;
constexpr double kC8Fd = 1e-5, kC8Budget = 120.0;

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double column_sum_error(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, c);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

Vector random_simplex(std::mt19937_64& rng, std::size_t n, double floor) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    Vector v(n);
    double s = 0.0;
    for (double& x : v) s += (x = u(rng));
    for (double& x : v) x /= s;
    return v;
}

IBProblem random_problem(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
    Matrix pyx(ny, nx);
    for (std::size_t x = 0; x < nx; ++x) pyx.set_column(x, random_simplex(rng, ny, 0.05));
    return IBProblem::make(pyx, random_simplex(rng, nx, 0.05));
}

DecoderRoot random_root(std::mt19937_64& rng, std::size_t ny, std::size_t clusters, double beta) {
    DecoderRoot r{Matrix(ny, clusters), random_simplex(rng, clusters, 0.2), beta};
    for (std::size_t t = 0; t < clusters; ++t) r.decoders.set_column(t, random_simplex(rng, ny, 0.1));
    return r;
}

double root_distance(const DecoderRoot& a, const DecoderRoot& b) {
    return std::max(max_abs_diff(a.decoders, b.decoders), max_abs_diff(a.marginal, b.marginal));
}

Matrix identity_minus(const Matrix& m) { return Matrix::identity(m.rows()) - m; }

Outcome bifurcation_location() {
    TrackerConfig cfg;
    cfg.delta_beta = -103.0 / 3200.0;
    const auto recs = ibrt1(bsc_problem(kAlpha), 32.0, bsc_exact_root(kAlpha, 32.0).root, cfg);
    Outcome o;
    for (std::size_t i = 1; i < recs.size(); ++i) {
        if (recs[i - 1].clusters() == 2 && recs[i].clusters() == 1) {
            const double drop = recs[i].beta;
            o.pass = drop >= kC1Lo && drop <= kC1Hi;
            o.detail = fmt("count 2->1 at beta=%.6g (last two-cluster point %.6g), required [%g, ", drop,
                           recs[i - 1].beta, kC1Lo) +
                       fmt("%g]", kC1Hi);
            o.notes.push_back("event at the drop: " + to_string(recs[i].event) +
                              fmt("; min sigma(I-S) on the two-cluster path %.3g", [&] {
                                  double m = INFINITY;
                                  for (std::size_t k = 0; k < i; ++k)
                                      if (std::isfinite(recs[k].singular_metric)) m = std::min(m, recs[k].singular_metric);
                                  return m;
                              }()));
            const DecoderRoot& last = recs[i - 1].root;
            double gap = 0.0;
            for (std::size_t y = 0; y < last.ny(); ++y) gap = std::max(gap, std::abs(last.decoders(y, 0) - last.decoders(y, 1)));
            o.notes.push_back(fmt("decoder gap at the last two-cluster point %.4g (merge threshold %g)", gap, kDefaultDelta2));
            return o;
        }
    }
    o.detail = "cluster count never dropped from 2 to 1";
    return o;
}

Outcome derivative_accuracy() {
    const IBProblem prob = bsc_problem(kAlpha);
    double worst = 0.0;
    for (double beta : {7.5, 8.0, 10.0, 16.0, 32.0}) {
        const OdeSolution s = solve_ib_ode(bsc_exact_root(kAlpha, beta).root, prob, beta);
        worst = std::max(worst, max_abs_diff(s.v, bsc_exact_derivative(kAlpha, beta).log_decoder));
    }
    return {worst < kC2Tol, fmt("max L-inf error %.3g over beta in {7.5, 8, 10, 16, 32}, required < %g", worst, kC2Tol), {}};
}

Outcome order_of_convergence() {
    const tools::ProblemSpec spec = tools::resolve_problem("bsc:0.3");
    const double beta_end = bsc_beta_c(kAlpha) + 0.1;
    std::vector<double> steps;
    for (int k = 0; k <= 7; ++k) steps.push_back(std::ldexp(103.0 / 32.0, -k));
    const auto methods = tools::default_order_methods();
    const tools::OrderStudy st = tools::order_study(spec, 32.0, beta_end, steps, methods, 2, 3, tools::thread_cap());
    double euler = NAN, corr = NAN, anneal = NAN;
    for (const auto& f : st.fits) {
        if (f.method == "euler") euler = f.fit.slope;
        if (f.method == "euler_ba1") corr = f.fit.slope;
        if (f.method == "anneal") anneal = f.fit.slope;
    }
    Outcome o;
    o.pass = euler >= kC3EulerLo && euler <= kC3EulerHi && corr >= kC3CorrMin && anneal >= kC3AnnealLo &&
             anneal <= kC3AnnealHi;
    o.detail = fmt("slopes euler %.3f, euler+1BA %.3f, anneal %.3f", euler, corr, anneal) +
               fmt("; required euler in [%g, %g]", kC3EulerLo, kC3EulerHi) + fmt(", euler+1BA >= %g", kC3CorrMin) +
               fmt(", anneal in [%g, %g]", kC3AnnealLo, kC3AnnealHi);
    o.notes.push_back("fit: log10(sup encoder error) on log10(step), three smallest steps (common endpoint near beta_c + 0.1)");

    // Asymptotic diagnostic: five further halvings, reported only.
    std::vector<double> fine;
    for (int k = 8; k <= 12; ++k) fine.push_back(std::ldexp(103.0 / 32.0, -k));
    const tools::OrderStudy tail = tools::order_study(spec, 32.0, beta_end, fine, methods, 2, 3, tools::thread_cap());
    for (const auto& f : tail.fits)
        o.notes.push_back("diagnostic " + f.method + fmt(": slope %.3f on steps %.3g", f.fit.slope, fine[fine.size() - 3]) +
                          fmt("..%.3g", fine.back()));
    return o;
}

Outcome curve_accuracy() {
    const tools::ProblemSpec spec = tools::resolve_problem("bsc:0.3");
    const std::vector<double> grid = tools::descending_grid(32.0, 0.32, 100);
    const auto pts = tools::information_curve(spec, grid, tools::CurveMethod::track, 2, TrackerConfig{});
    double worst = 0.0;
    for (const auto& p : pts)
        worst = std::max(worst, std::abs(p.info.i_y - mrs_gerber_curve(kAlpha, std::min(p.info.i_x, std::log(2.0)))));
    return {worst < kC4Tol && pts.size() == grid.size(),
            fmt("max vertical deviation %.3g nats over %g grid points, required < %g", worst,
                static_cast<double>(pts.size()), kC4Tol),
            {}};
}

Outcome detectability() {
    const tools::ProblemSpec spec = tools::resolve_problem("decomposable");
    std::vector<double> low;
    for (int i = 0; i < 50; ++i) low.push_back(0.99 - 0.01 * i);
    double gap1 = INFINITY;
    for (const auto& r : tools::eig_scan(spec, low, 1, tools::RootSource::trivial))
        gap1 = std::min(gap1, r.min_abs_one_minus_eig);
    const std::vector<double> wide = tools::descending_grid(1.5, 0.5, 201);
    double best = INFINITY, at = NAN;
    for (const auto& r : tools::eig_scan(spec, wide, 2, tools::RootSource::trivial))
        if (r.min_abs_one_minus_eig < best) {
            best = r.min_abs_one_minus_eig;
            at = r.beta;
        }
    Outcome o;
    o.pass = gap1 > kC5Gap && std::abs(at - 1.0) <= kC5Window && best < kC5Unit;
    o.detail = fmt("T=1: min|1-eig| %.3g on [0.5, 1) (required > %g)", gap1, kC5Gap) +
               fmt("; T=2: min|1-eig| %.3g at beta=%.4g", best, at) + fmt(" (required beta in 1 +- %g)", kC5Window);
    return o;
}

struct KernelCheck {
    std::size_t null_s = 0;
    std::size_t null_j = 0;
    double lift = 0.0;
    double side = 0.0;
};

KernelCheck kernel_check(const DecoderRoot& root, const IBProblem& prob, double beta) {
    const Matrix IS = identity_minus(s_matrix(root, prob, beta));
    const Matrix IJ = identity_minus(ba_jacobian_log_decoder(root, prob, beta).m);
    KernelCheck c;
    c.null_s = numerical_nullity(IS, kC6Rank);
    c.null_j = numerical_nullity(IJ, kC6Rank);
    if (c.null_s == 0) return c;
    const std::size_t T = root.clusters(), ny = prob.ny();
    const Vector v = left_null_vector(IS);
    const Vector w = kernel_lift(v, ny, beta);
    c.lift = norm_inf(left_multiply(w, IJ));
    for (std::size_t y = 0; y < ny; ++y) {
        double s = 0.0;
        for (std::size_t t = 0; t < T; ++t) s += v[t * ny + y];
        c.side = std::max(c.side, std::abs(s));
    }
    double u = 0.0;
    for (std::size_t t = 0; t < T; ++t) u += w[T * ny + t];
    c.side = std::max(c.side, std::abs(u));
    return c;
}

Outcome kernel_suite() {
    std::mt19937_64 rng(0xacce);
    std::size_t mismatches = 0, kernels = 0, roots = 0;
    double lift = 0.0, side = 0.0;
    while (roots < 5) {
        const IBProblem prob = random_problem(rng, 3 + roots % 2, 3);
        const double beta = std::uniform_real_distribution<double>(3.0, 20.0)(rng);
        const BAResult ba = ba_iterate(random_encoder(3, prob.nx(), rng()), prob, beta, 1e-14, 1000000);
        const DecoderRoot reduced = reduce_root(ba.root).root;
        const BAResult root = ba_iterate(encoder_from_decoder(reduced, prob, beta).encoder, prob, beta, 1e-14, 1000000);
        const KernelCheck c = kernel_check(root.root, prob, beta);
        mismatches += c.null_s != c.null_j;
        kernels += c.null_s;
        lift = std::max(lift, c.lift);
        side = std::max(side, c.side);
        ++roots;
    }
    const double beta = bsc_beta_c(kAlpha) + 1e-8;
    const KernelCheck b = kernel_check(bsc_exact_root(kAlpha, beta).root, bsc_problem(kAlpha), beta);
    mismatches += b.null_s != b.null_j;
    kernels += b.null_s;
    lift = std::max(lift, b.lift);
    side = std::max(side, b.side);
    Outcome o;
    o.pass = mismatches == 0 && b.null_s > 0 && lift < kC6Lift && side < kC6Side;
    o.detail = fmt("nullity mismatches %g over 6 roots (%g kernel directions)", static_cast<double>(mismatches),
                   static_cast<double>(kernels)) +
               fmt("; lift residual %.3g (required < %g)", lift, kC6Lift) + fmt("; side conditions %.3g (required < %g)", side, kC6Side);
    return o;
}

Outcome oracle_cross_validation() {
    const IBProblem prob = bsc_problem(kAlpha);
    double enc = 0.0;
    for (double beta : {8.0, 16.0}) {
        const BruteForceResult bf = brute_force_root(prob, beta, 2, 101);
        enc = std::max(enc, tools::encoder_distance(bf.encoder, bsc_exact_root(kAlpha, beta).encoder));
    }
    const DecoderRoot triv{Matrix{{0.5}, {0.5}}, {1.0}, 1.0};
    auto excess = [&](double beta) { return cx_leading_scaled_eigenvalue(cx_matrix(triv, prob, 0, beta), beta) - 1.0; };
    double lo = 1.0, hi = 32.0;
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double cross = 0.5 * (lo + hi);
    const double err = std::abs(cross - bsc_beta_c(kAlpha));
    return {enc < kC7Enc && err < kC7Cross,
            fmt("brute force vs exact encoder %.3g (required < %g)", enc, kC7Enc) +
                fmt("; C_X crossing at beta=%.10g, |beta - beta_c| = %.3g", cross, err) + fmt(" (required < %g)", kC7Cross),
            {}};
}

Outcome property_suites() {
    std::mt19937_64 rng(0x5eed);
    double ba_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t nx = 2 + rng() % 4, ny = 2 + rng() % 4, T = 1 + rng() % 4;
        const IBProblem prob = random_problem(rng, nx, ny);
        const double beta = std::uniform_real_distribution<double>(0.1, 40.0)(rng);
        const BACycle c = ba_cycle(random_root(rng, ny, T, beta), prob, beta);
        double m = 0.0;
        for (double x : c.root.marginal) m += x;
        ba_err = std::max({ba_err, column_sum_error(c.encoder.p), column_sum_error(c.root.decoders),
                           std::abs(m - 1.0), max_abs_diff(prob.p_y_given_x() * c.inverse_encoder, c.root.decoders)});
    }

    std::size_t red_fail = 0;
    double info_err = 0.0;
    for (int i = 0; i < 200; ++i) {
        const IBProblem prob = random_problem(rng, 3, 3);
        const DecoderRoot base = random_root(rng, 3, 2, 3.0);
        DecoderRoot split{Matrix(3, 3), {base.marginal[0] * 0.3, base.marginal[1], base.marginal[0] * 0.7}, 3.0};
        for (std::size_t y = 0; y < 3; ++y) {
            split.decoders(y, 0) = base.decoders(y, 0);
            split.decoders(y, 1) = base.decoders(y, 1);
            split.decoders(y, 2) = base.decoders(y, 0);
        }
        const ReductionReport rep = reduce_root(split);
        red_fail += reduce_root(rep.root).changed;
        const InfoPoint a = root_info(split, prob, 3.0), b = root_info(rep.root, prob, 3.0);
        info_err = std::max({info_err, std::abs(a.i_x - b.i_x), std::abs(a.i_y - b.i_y)});
    }

    double fd_err = 0.0;
    std::vector<std::pair<IBProblem, DecoderRoot>> cases;
    for (int k = 0; k < 5; ++k) {
        const std::size_t nx = 2 + k % 3, ny = 2 + (k + 1) % 3, T = 1 + k % 3;
        cases.emplace_back(random_problem(rng, nx, ny), random_root(rng, ny, T, 1.5 + 2.0 * k));
    }
    for (double beta : {8.0, 20.0}) cases.emplace_back(bsc_problem(kAlpha), bsc_exact_root(kAlpha, beta).root);
    for (const auto& [prob, root] : cases) {
        const double beta = root.beta;
        const Matrix fd = fd_jacobian_log_decoder(root, prob, beta);
        const BAJacobian printed = ba_jacobian_log_decoder(root, prob, beta);
        const LogLayout& L = printed.layout;
        Matrix scaled(fd);
        for (std::size_t r = 0; r < L.size(); ++r)
            for (std::size_t t = 0; t < L.clusters; ++t) scaled(r, L.mrg(t)) *= 1.0 - beta;
        fd_err = std::max({fd_err, max_abs_diff(ba_jacobian_independent(root, prob, beta).m, fd),
                           max_abs_diff(printed.m, scaled),
                           max_abs_diff(beta_partials_log_decoder(root, prob, beta), fd_beta_partials(root, prob, beta))});
        const Vector z = to_log_coords(root);
        Vector dz(z.size());
        std::normal_distribution<double> g(0.0, 1.0);
        for (double& e : dz) e = g(rng);
        const double h = 1e-6;
        auto log_enc = [&](double s) {
            Vector zs(z);
            for (std::size_t i = 0; i < zs.size(); ++i) zs[i] += s * dz[i];
            return encoder_from_decoder(from_log_coords(zs, L, beta + s), prob, beta + s).encoder.p;
        };
        const Matrix ep = log_enc(h), em = log_enc(-h);
        const Matrix ex = exchange_dec_to_enc(dz, root, prob, beta);
        for (std::size_t t = 0; t < ex.rows(); ++t)
            for (std::size_t x = 0; x < ex.cols(); ++x)
                fd_err = std::max(fd_err, std::abs(ex(t, x) - (std::log(ep(t, x)) - std::log(em(t, x))) / (2.0 * h)));
    }

    DecoderRoot start = bsc_exact_root(kAlpha, 12.0).root;
    start.decoders(0, 0) += 1e-3;
    start.decoders(1, 0) -= 1e-3;
    const double before = root_distance(start, bsc_exact_root(kAlpha, 12.0).root);
    TrackerConfig cfg;
    cfg.delta_beta = -0.1;
    cfg.beta_min = 9.0;
    const auto recs = ibrt1(bsc_problem(kAlpha), 12.0, start, cfg);
    const double after = root_distance(recs.back().root, bsc_exact_root(kAlpha, recs.back().beta).root);

    Outcome o;
    o.pass = ba_err < 1e-12 && red_fail == 0 && info_err < 1e-12 && fd_err < kC8Fd && after < before;
    o.detail = fmt("BA invariants %.2g; reduction idempotence failures %g", ba_err, static_cast<double>(red_fail)) +
               fmt(", info change %.2g", info_err) + fmt("; derivative FD error %.3g (required < %g)", fd_err, kC8Fd) +
               fmt("; pull-back 12->%.3g: %.3g -> %.3g", recs.back().beta, before, after);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    bool report_only = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--report-only") == 0) {
            report_only = true;
        } else {
            std::fprintf(stderr, "usage: %s [--report-only]\n", argv[0]);
            return 2;
        }
    }
    struct Criterion {
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"bifurcation location", kC1Budget, bifurcation_location},
        {"derivative accuracy", kC2Budget, derivative_accuracy},
        {"order of convergence", kC3Budget, order_of_convergence},
        {"curve accuracy", kC4Budget, curve_accuracy},
        {"detectability", kC5Budget, detectability},
        {"kernel correspondence", kC6Budget, kernel_suite},
        {"oracle cross-validation", kC7Budget, oracle_cross_validation},
        {"property suites", kC8Budget, property_suites},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < criteria[i].budget;
        failed += !pass;
        std::printf("[%s] %zu %s: %s; runtime %.2f s (budget %g s)\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.detail.c_str(), secs, criteria[i].budget);
        for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    std::fflush(stdout);
    if (report_only) return 0;
    return failed == 0 ? 0 : 1;
}

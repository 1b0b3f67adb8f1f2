#include "ibrt/oracles.hpp"

#include <cmath>
#include <limits>

#include "ibrt/ba.hpp"
#include "ibrt/error.hpp"

namespace ibrt {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw InputError("BSC crossover must lie in (0, 1/2)");
}

// Solves beta k atanh(k tanh s) = s for s > 0, with k = 1 - 2 alpha.
double solve_rapidity(double k, double beta) {
    auto g = [&](double s) { return beta * k * std::atanh(k * std::tanh(s)) - s; };
    double lo = 0.0;
    double hi = beta * k * std::atanh(k) + 1.0;
    // g > 0 just above 0 and g(hi) < 0; the root is unique.
    for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

IBProblem bsc_problem(double alpha) {
    check_alpha(alpha);
    return IBProblem::make(Matrix{{1.0 - alpha, alpha}, {alpha, 1.0 - alpha}}, {0.5, 0.5});
}

double bsc_beta_c(double alpha) {
    check_alpha(alpha);
    const double k = 1.0 - 2.0 * alpha;
    return 1.0 / (k * k);
}

InfoPoint BscSolution::info() const {
    return {kLn2 - binary_entropy(delta), kLn2 - binary_entropy(binary_convolution(alpha, delta))};
}

BscSolution bsc_exact_root(double alpha, double beta) {
    check_alpha(alpha);
    if (!(beta > 0.0)) throw InputError("beta must be positive");
    BscSolution s;
    s.alpha = alpha;
    s.beta = beta;
    s.beta_c = bsc_beta_c(alpha);
    const double k = 1.0 - 2.0 * alpha;
    if (beta > s.beta_c) {
        const double r = solve_rapidity(k, beta);
        s.t = std::tanh(r);
        s.delta = 1.0 / (1.0 + std::exp(2.0 * r));
    }
    const double d = s.delta;
    s.encoder = Encoder{Matrix{{1.0 - d, d}, {d, 1.0 - d}}};
    const double ad = binary_convolution(alpha, d);
    s.root = DecoderRoot{Matrix{{1.0 - ad, ad}, {ad, 1.0 - ad}}, {0.5, 0.5}, beta};
    return s;
}

BscDerivative bsc_exact_derivative(double alpha, double beta) {
    const BscSolution s = bsc_exact_root(alpha, beta);
    if (s.trivial()) throw BranchError("exact derivative exists only above the critical beta");
    const double k = 1.0 - 2.0 * alpha;
    const double t = s.t;
    const double one_minus_t2 = 4.0 * s.delta * (1.0 - s.delta);
    const double dt = k * std::atanh(k * t) / (1.0 / one_minus_t2 - beta * k * k / (1.0 - k * k * t * t));

    BscDerivative out;
    out.dt_dbeta = dt;
    const double dd = 0.5 * k * dt;
    out.decoder = Matrix{{dd, -dd}, {-dd, dd}};
    out.encoder = Matrix{{0.5 * dt, -0.5 * dt}, {-0.5 * dt, 0.5 * dt}};
    out.log_encoder = Matrix(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out.log_encoder(i, j) = out.encoder(i, j) / s.encoder.p(i, j);
    // Layout: cluster-major decoder entries, then the two marginals.
    out.log_decoder.assign(6, 0.0);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t y = 0; y < 2; ++y) out.log_decoder[c * 2 + y] = out.decoder(y, c) / s.root.decoders(y, c);
    return out;
}

double inverse_binary_entropy(double h) {
    if (!(h >= 0.0 && h <= kLn2 + 1e-15)) throw RangeError("binary entropy value outside [0, ln 2]");
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (binary_entropy(mid) < h)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mrs_gerber_curve(double alpha, double i_x) {
    check_alpha(alpha);
    if (!(i_x >= 0.0 && i_x <= kLn2 + 1e-15)) throw RangeError("i_x must lie in [0, ln 2]");
    const double delta = inverse_binary_entropy(std::max(0.0, kLn2 - i_x));
    return kLn2 - binary_entropy(binary_convolution(alpha, delta));
}

IBProblem decomposable_problem() { return IBProblem::make(Matrix{{1.0, 0.0}, {0.0, 1.0}}, {0.3, 0.7}); }

DecoderRoot decomposable_trivial_root(double beta) { return DecoderRoot{Matrix{{0.3}, {0.7}}, {1.0}, beta}; }

DecoderRoot decomposable_boundary_root(double beta) {
    return DecoderRoot{Matrix{{1.0, 0.0}, {0.0, 1.0}}, {0.3, 0.7}, beta};
}

DecoderRoot decomposable_degenerate_root(double beta) {
    return DecoderRoot{Matrix{{0.3, 0.3}, {0.7, 0.7}}, {0.4, 0.6}, beta};
}

BruteForceResult brute_force_root(const IBProblem& prob, double beta, std::size_t clusters,
                                  std::size_t resolution) {
    if (prob.nx() > 3 || clusters > 2 || resolution > 201)
        throw TooLarge("brute force is limited to |X| <= 3, T <= 2 and resolution <= 201");
    if (clusters == 0 || resolution < 2) throw InputError("brute force needs T >= 1 and resolution >= 2");
    const std::size_t nx = prob.nx();
    auto lagrangian = [&](const Encoder& e) {
        const InfoPoint ip = mutual_informations(e, prob);
        return ip.i_x - beta * ip.i_y;
    };

    BruteForceResult res;
    if (clusters == 1) {
        res.encoder = Encoder{Matrix(1, nx, 1.0)};
        res.lagrangian = res.grid_lagrangian = lagrangian(res.encoder);
        return res;
    }

    std::size_t total = 1;
    for (std::size_t i = 0; i < nx; ++i) total *= resolution;
    const double step = 1.0 / static_cast<double>(resolution - 1);
    Encoder e{Matrix(2, nx)};
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t x = 0; x < nx; ++x) {
            const double p = static_cast<double>(rem % resolution) * step;
            rem /= resolution;
            e.p(0, x) = p;
            e.p(1, x) = 1.0 - p;
        }
        const double l = lagrangian(e);
        if (l < best) {
            best = l;
            best_index = flat;
        }
    }
    std::size_t rem = best_index;
    for (std::size_t x = 0; x < nx; ++x) {
        const double p = static_cast<double>(rem % resolution) * step;
        rem /= resolution;
        e.p(0, x) = p;
        e.p(1, x) = 1.0 - p;
    }
    res.grid_lagrangian = best;

    // Pull off the simplex boundary so both clusters carry mass, then polish.
    const double eps = 1e-6;
    Encoder start{Matrix(2, nx)};
    for (std::size_t x = 0; x < nx; ++x) {
        start.p(0, x) = (1.0 - eps) * e.p(0, x) + 0.5 * eps;
        start.p(1, x) = 1.0 - start.p(0, x);
    }
    const BAResult polished = ba_iterate(start, prob, beta, 1e-14, kDefaultBaMaxIter);
    res.encoder = polished.encoder;
    res.lagrangian = lagrangian(res.encoder);
    return res;
}

}  // namespace ibrt

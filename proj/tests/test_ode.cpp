#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ibrt/ba.hpp"
#include "ibrt/deriv.hpp"
#include "ibrt/error.hpp"
#include "ibrt/ode.hpp"
#include "ibrt/oracles.hpp"
#include "ibrt/reduction.hpp"

using namespace ibrt;

namespace {

constexpr double kAlpha = 0.3;

// Central difference of the log decoder coordinates of BA fixed points
// reached by warm starts from `root` at beta +- h.
Vector fd_ba_path(const DecoderRoot& root, const IBProblem& prob, double beta, double h) {
    auto at = [&](double b) {
        const Encoder enc = encoder_from_decoder(root, prob, b).encoder;
        return to_log_coords(ba_iterate(enc, prob, b, 1e-15, 2000000).root);
    };
    const Vector p = at(beta + h);
    const Vector m = at(beta - h);
    Vector out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = (p[i] - m[i]) / (2.0 * h);
    return out;
}

}  // namespace

TEST_SUITE("ode") {

TEST_CASE("BSC derivative matches the closed form") {
    const IBProblem prob = bsc_problem(kAlpha);
    for (double beta : {8.0, 10.0, 20.0}) {
        const OdeSolution s = solve_ib_ode(bsc_exact_root(kAlpha, beta).root, prob, beta);
        CHECK(max_abs_diff(s.v, bsc_exact_derivative(kAlpha, beta).log_decoder) < 1e-8);
        CHECK(s.condition >= 1.0);
        CHECK(s.singular_metric > kDefaultDelta3);
    }
}

TEST_CASE("BSC derivative matches differences of the exact path") {
    const IBProblem prob = bsc_problem(kAlpha);
    const double beta = 9.0, h = 1e-4;
    const OdeSolution s = solve_ib_ode(bsc_exact_root(kAlpha, beta).root, prob, beta);
    const Vector p = to_log_coords(bsc_exact_root(kAlpha, beta + h).root);
    const Vector m = to_log_coords(bsc_exact_root(kAlpha, beta - h).root);
    for (std::size_t i = 0; i < p.size(); ++i)
        CHECK(s.v[i] == doctest::Approx((p[i] - m[i]) / (2.0 * h)).epsilon(1e-5).scale(1e-3));
}

TEST_CASE("trivial root does not move") {
    const OdeSolution s = solve_ib_ode(DecoderRoot{Matrix{{0.5}, {0.5}}, {1.0}, 4.0}, bsc_problem(kAlpha), 4.0);
    CHECK(norm_inf(s.v) < 1e-14);
}

TEST_CASE("derivative blows up at the bifurcation") {
    const IBProblem prob = bsc_problem(kAlpha);
    const double bc = bsc_beta_c(kAlpha);
    const double near = norm_inf(solve_ib_ode_unguarded(bsc_exact_root(kAlpha, bc + 1e-8).root, prob, bc + 1e-8).v);
    const double far = norm_inf(solve_ib_ode(bsc_exact_root(kAlpha, 32.0).root, prob, 32.0).v);
    CHECK(near >= 1e3 * far);
}

TEST_CASE("guard refuses the solve close to the bifurcation") {
    const IBProblem prob = bsc_problem(kAlpha);
    const double beta = bsc_beta_c(kAlpha) + 1e-4;
    try {
        (void)solve_ib_ode(bsc_exact_root(kAlpha, beta).root, prob, beta);
        FAIL("expected NearBifurcation");
    } catch (const NearBifurcation& e) {
        CHECK(e.singular_metric() < kDefaultDelta3);
    }
    CHECK_NOTHROW((void)solve_ib_ode(bsc_exact_root(kAlpha, beta).root, prob, beta, 1e-6));
}

TEST_CASE("printed right-hand side equals minus the beta partials") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const IBProblem prob = testutil::random_problem(rng, 3 + trial % 3, 3);
        const DecoderRoot r = testutil::random_root(rng, 3, 2 + trial % 2, 3.0);
        const Vector printed = ib_ode_rhs_printed(r, prob, 3.0);
        const Vector partials = beta_partials_log_decoder(r, prob, 3.0);
        for (std::size_t i = 0; i < printed.size(); ++i) CHECK(std::abs(printed[i] + partials[i]) < 1e-10);
        CHECK(solve_ib_ode_unguarded(r, prob, 3.0).rhs_mismatch < 1e-10);
    }
}

TEST_CASE("derivative at converged random roots matches the BA path") {
    std::mt19937_64 rng(43);
    int checked = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const IBProblem prob = testutil::random_problem(rng, 4, 3);
        const double beta = 12.0;
        const BAResult ba = testutil::converged(prob, beta, 2, 100 + static_cast<std::uint64_t>(trial));
        const ReductionReport rep = reduce_root(ba.root);
        if (rep.root.clusters() < 2) continue;
        const BAResult root = ba_iterate(encoder_from_decoder(rep.root, prob, beta).encoder, prob, beta, 1e-15, 2000000);
        const OdeSolution s = solve_ib_ode_unguarded(root.root, prob, beta);
        if (s.singular_metric < 0.05) continue;
        const Vector fd = fd_ba_path(root.root, prob, beta, 1e-4);
        CHECK(max_abs_diff(s.v, fd) < 1e-5 * std::max(1.0, norm_inf(fd)));
        ++checked;
    }
    CHECK(checked >= 2);
}

}  // TEST_SUITE

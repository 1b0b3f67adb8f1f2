#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ibrt/ba.hpp"
#include "ibrt/deriv.hpp"
#include "ibrt/error.hpp"
#include "ibrt/oracles.hpp"

using namespace ibrt;

namespace {

constexpr double kAlpha = 0.3;
const double kLn2 = std::log(2.0);

double lagrangian(const Encoder& e, const IBProblem& prob, double beta) {
    const InfoPoint ip = mutual_informations(e, prob);
    return ip.i_x - beta * ip.i_y;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("critical beta") {
    CHECK(bsc_beta_c(0.3) == doctest::Approx(6.25));
    CHECK(bsc_beta_c(0.1) == doctest::Approx(1.5625));
    CHECK_THROWS_AS((void)bsc_beta_c(0.5), InputError);
    CHECK_THROWS_AS((void)bsc_exact_root(0.3, 0.0), InputError);
}

TEST_CASE("exact root satisfies the self-consistent equation") {
    const double k = 1.0 - 2.0 * kAlpha;
    for (double beta : {7.0, 8.0, 10.0, 16.0, 32.0}) {
        const BscSolution s = bsc_exact_root(kAlpha, beta);
        CHECK_FALSE(s.trivial());
        // ln((1 - delta) / delta) = beta * (KL to the far decoder - KL to the near one)
        const double lhs = std::log((1.0 - s.delta) / s.delta);
        const double rhs = beta * k * std::log((1.0 + k * s.t) / (1.0 - k * s.t));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("exact roots are BA fixed points") {
    const IBProblem prob = bsc_problem(kAlpha);
    for (double beta : {7.0, 8.0, 10.0, 16.0, 32.0}) {
        const BscSolution s = bsc_exact_root(kAlpha, beta);
        const BACycle c = ba_cycle(s.root, prob, beta);
        CHECK(max_abs_diff(c.encoder.p, s.encoder.p) < 1e-12);
        CHECK(max_abs_diff(c.root.decoders, s.root.decoders) < 1e-12);
    }
}

TEST_CASE("limits of the crossover probability") {
    CHECK(bsc_exact_root(kAlpha, 6.0).delta == 0.5);
    CHECK(bsc_exact_root(kAlpha, bsc_beta_c(kAlpha)).trivial());
    CHECK(bsc_exact_root(kAlpha, 6.2501).delta > 0.49);
    CHECK(bsc_exact_root(kAlpha, 500.0).delta < 1e-10);
    const double i_far = bsc_exact_root(kAlpha, 500.0).info().i_y;
    CHECK(i_far == doctest::Approx(kLn2 - binary_entropy(kAlpha)).epsilon(1e-9));
}

TEST_CASE("exact derivative against differences") {
    const double h = 1e-5;
    for (double beta : {8.0, 32.0}) {
        const BscDerivative d = bsc_exact_derivative(kAlpha, beta);
        const double fd = (bsc_exact_root(kAlpha, beta + h).t - bsc_exact_root(kAlpha, beta - h).t) / (2.0 * h);
        CHECK(d.dt_dbeta == doctest::Approx(fd).epsilon(1e-6));
        const Matrix ep = bsc_exact_root(kAlpha, beta + h).encoder.p;
        const Matrix em = bsc_exact_root(kAlpha, beta - h).encoder.p;
        CHECK(d.encoder(0, 1) == doctest::Approx((ep(0, 1) - em(0, 1)) / (2.0 * h)).epsilon(1e-6));
    }
    CHECK_THROWS_AS((void)bsc_exact_derivative(kAlpha, 5.0), BranchError);
}

TEST_CASE("information curve of the symmetric channel") {
    CHECK(mrs_gerber_curve(kAlpha, 0.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(mrs_gerber_curve(kAlpha, kLn2) == doctest::Approx(kLn2 - binary_entropy(kAlpha)).epsilon(1e-12));
    const BscSolution s = bsc_exact_root(kAlpha, 9.0);
    CHECK(mrs_gerber_curve(kAlpha, s.info().i_x) == doctest::Approx(s.info().i_y).epsilon(1e-10));
    CHECK_THROWS_AS((void)mrs_gerber_curve(kAlpha, 1.0), RangeError);
    CHECK_THROWS_AS((void)mrs_gerber_curve(kAlpha, -0.1), RangeError);
    CHECK(inverse_binary_entropy(binary_entropy(0.2)) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("information curve is concave and increasing") {
    const int n = 60;
    double prev = -1.0;
    for (int i = 1; i < n; ++i) {
        const double x = kLn2 * i / n;
        const double h = kLn2 / n * 0.5;
        const double f = mrs_gerber_curve(kAlpha, x);
        CHECK(f > prev);
        prev = f;
        CHECK(mrs_gerber_curve(kAlpha, x - h) + mrs_gerber_curve(kAlpha, x + h) - 2.0 * f <= 1e-14);
    }
}

TEST_CASE("decomposable problem roots") {
    const IBProblem prob = decomposable_problem();
    const Encoder boundary = encoder_from_decoder(decomposable_boundary_root(2.0), prob).encoder;
    CHECK(max_abs_diff(boundary.p, Matrix::identity(2)) == 0.0);
    const InfoPoint ip = mutual_informations(boundary, prob);
    CHECK(ip.i_x == doctest::Approx(binary_entropy(0.3)));
    CHECK(ip.i_y == doctest::Approx(binary_entropy(0.3)));
    const Encoder triv = encoder_from_decoder(decomposable_trivial_root(2.0), prob).encoder;
    CHECK(mutual_informations(triv, prob).i_x == doctest::Approx(0.0).scale(1.0));
    const Encoder degen = encoder_from_decoder(decomposable_degenerate_root(2.0), prob).encoder;
    CHECK(mutual_informations(degen, prob).i_x == doctest::Approx(0.0).scale(1.0));
    CHECK(lagrangian(boundary, prob, 1.0) == doctest::Approx(lagrangian(triv, prob, 1.0)).scale(1.0));
    CHECK(lagrangian(boundary, prob, 2.0) < lagrangian(triv, prob, 2.0));
    CHECK(lagrangian(boundary, prob, 0.5) > lagrangian(triv, prob, 0.5));
}

TEST_CASE("brute force finds the exact BSC root") {
    const IBProblem prob = bsc_problem(kAlpha);
    const BscSolution s = bsc_exact_root(kAlpha, 10.0);
    const BruteForceResult bf = brute_force_root(prob, 10.0, 2, 101);
    CHECK(bf.lagrangian <= bf.grid_lagrangian + 1e-12);
    CHECK(bf.lagrangian == doctest::Approx(lagrangian(s.encoder, prob, 10.0)).epsilon(1e-8));
    Matrix swapped(2, 2);
    for (std::size_t x = 0; x < 2; ++x) {
        swapped(0, x) = bf.encoder.p(1, x);
        swapped(1, x) = bf.encoder.p(0, x);
    }
    CHECK(std::min(max_abs_diff(bf.encoder.p, s.encoder.p), max_abs_diff(swapped, s.encoder.p)) < 1e-5);
}

TEST_CASE("brute force below one is trivial") {
    const BruteForceResult bf = brute_force_root(bsc_problem(kAlpha), 0.5, 2, 51);
    CHECK(bf.lagrangian == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("brute force on the decomposable problem") {
    const BruteForceResult bf = brute_force_root(decomposable_problem(), 2.0, 2, 51);
    CHECK(bf.lagrangian == doctest::Approx(-binary_entropy(0.3)).epsilon(1e-8));
    CHECK_THROWS_AS((void)brute_force_root(IBProblem::make(Matrix::identity(4), {0.25, 0.25, 0.25, 0.25}), 2.0, 2, 11),
                    TooLarge);
    CHECK_THROWS_AS((void)brute_force_root(decomposable_problem(), 2.0, 3, 11), TooLarge);
    CHECK_THROWS_AS((void)brute_force_root(decomposable_problem(), 2.0, 2, 1), InputError);
}

TEST_CASE("C_X crossing on the trivial branch locates the critical beta") {
    const IBProblem prob = bsc_problem(kAlpha);
    const DecoderRoot triv{Matrix{{0.5}, {0.5}}, {1.0}, 1.0};
    auto excess = [&](double beta) { return cx_leading_scaled_eigenvalue(cx_matrix(triv, prob, 0, beta), beta) - 1.0; };
    double lo = 1.0, hi = 20.0;
    REQUIRE(excess(lo) < 0.0);
    REQUIRE(excess(hi) > 0.0);
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(bsc_beta_c(kAlpha)).epsilon(1e-12));
}

}  // TEST_SUITE

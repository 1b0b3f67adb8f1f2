#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ibrt/ba.hpp"
#include "ibrt/deriv.hpp"
#include "ibrt/numerics.hpp"
#include "ibrt/oracles.hpp"
#include "ibrt/reduction.hpp"

using namespace ibrt;

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double pick_real(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double column_sum_error(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, c);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("BA steps keep distributions normalized and Markov") {
    std::mt19937_64 rng(0x1b2);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t nx = pick(rng, 2, 5), ny = pick(rng, 2, 5), T = pick(rng, 1, 4);
        const IBProblem prob = testutil::random_problem(rng, nx, ny);
        const double beta = pick_real(rng, 0.1, 40.0);
        const DecoderRoot r = testutil::random_root(rng, ny, T, beta);
        const BACycle c = ba_cycle(r, prob, beta);
        CHECK(column_sum_error(c.encoder.p) < 1e-12);
        CHECK(column_sum_error(c.root.decoders) < 1e-12);
        CHECK(column_sum_error(c.inverse_encoder) < 1e-12);
        double m = 0.0;
        for (double x : c.root.marginal) m += x;
        CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
        // p(y|xhat) = sum_x p(y|x) p(x|xhat)
        const Matrix markov = prob.p_y_given_x() * c.inverse_encoder;
        CHECK(max_abs_diff(markov, c.root.decoders) < 1e-12);
    }
}

TEST_CASE("information is non-negative and obeys data processing") {
    std::mt19937_64 rng(0x2c3);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t nx = pick(rng, 2, 5), ny = pick(rng, 2, 5), T = pick(rng, 1, 4);
        const IBProblem prob = testutil::random_problem(rng, nx, ny);
        const InfoPoint ip = mutual_informations(random_encoder(T, nx, rng()), prob);
        CHECK(ip.i_x >= -1e-14);
        CHECK(ip.i_y >= -1e-14);
        CHECK(ip.i_y <= ip.i_x + 1e-12);
    }
}

TEST_CASE("kl divergence is non-negative and zero on the diagonal") {
    std::mt19937_64 rng(0x3d4);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = pick(rng, 1, 8);
        const Vector p = testutil::random_simplex(rng, n, 0.01);
        const Vector q = testutil::random_simplex(rng, n, 0.01);
        CHECK(kl_divergence(p, p) == 0.0);
        CHECK(kl_divergence(p, q) >= 0.0);
    }
}

TEST_CASE("reduction output is clean, normalized and idempotent") {
    std::mt19937_64 rng(0x4e5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t ny = pick(rng, 2, 4), T = pick(rng, 1, 6);
        DecoderRoot r = testutil::random_root(rng, ny, T, 3.0);
        if (T > 1 && trial % 3 == 0) {
            const std::size_t a = pick(rng, 0, T - 1), b = (a + 1) % T;
            for (std::size_t y = 0; y < ny; ++y) r.decoders(y, b) = r.decoders(y, a);
        }
        const double d1 = pick_real(rng, 0.01, 0.1), d2 = pick_real(rng, 0.01, 0.2);
        const ReductionReport rep = reduce_root(r, d1, d2);
        const DecoderRoot& out = rep.root;
        CHECK(out.clusters() <= T);
        CHECK(out.clusters() >= 1);
        double m = 0.0;
        for (double x : out.marginal) {
            m += x;
            CHECK(x >= d1);
        }
        CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < out.clusters(); ++i)
            for (std::size_t j = i + 1; j < out.clusters(); ++j) {
                double d = 0.0;
                for (std::size_t y = 0; y < ny; ++y) d = std::max(d, std::abs(out.decoders(y, i) - out.decoders(y, j)));
                CHECK(d >= d2);
            }
        CHECK_FALSE(reduce_root(out, d1, d2).changed);
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    std::mt19937_64 rng(0x5f6);
    std::vector<std::pair<IBProblem, DecoderRoot>> cases;
    for (int k = 0; k < 6; ++k) {
        const std::size_t nx = pick(rng, 2, 4), ny = pick(rng, 2, 4), T = pick(rng, 1, 3);
        const double beta = pick_real(rng, 0.5, 15.0);
        cases.emplace_back(testutil::random_problem(rng, nx, ny), testutil::random_root(rng, ny, T, beta));
    }
    for (double beta : {8.0, 20.0}) cases.emplace_back(bsc_problem(0.3), bsc_exact_root(0.3, beta).root);
    for (const auto& [prob, root] : cases) {
        const double beta = root.beta;
        const Matrix fd = fd_jacobian_log_decoder(root, prob, beta);
        const double scale = std::max(1.0, fd.max_abs());
        CHECK(max_abs_diff(ba_jacobian_independent(root, prob, beta).m, fd) < 1e-7 * scale);
        const Vector bp = fd_beta_partials(root, prob, beta);
        CHECK(max_abs_diff(beta_partials_log_decoder(root, prob, beta), bp) < 1e-7 * std::max(1.0, norm_inf(bp)));
    }
}

TEST_CASE("LU solves random well-conditioned systems") {
    std::mt19937_64 rng(0x607);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = pick(rng, 1, 12);
        Matrix a = testutil::random_matrix(rng, n, n);
        for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
        Vector x(n);
        for (double& e : x) e = pick_real(rng, -1.0, 1.0);
        const Vector b = a * x;
        const LinearSolveReport rep = lu_solve(a, b);
        CHECK(max_abs_diff(rep.solution, x) < 1e-10 * rep.condition);
        CHECK(rep.condition >= 1.0 - 1e-12);
    }
}

TEST_CASE("eigenvalues are invariant under orthogonal similarity") {
    std::mt19937_64 rng(0x718);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = pick(rng, 2, 8);
        const Matrix a = testutil::random_matrix(rng, n, n);
        const Matrix q = testutil::random_orthogonal(rng, n);
        const auto ea = eigenvalues(a);
        const auto eb = eigenvalues(q * a * q.transpose());
        std::vector<bool> used(n, false);
        double worst = 0.0;
        for (const auto& z : ea) {
            std::size_t best = n;
            double bd = 1e300;
            for (std::size_t k = 0; k < n; ++k)
                if (!used[k] && std::abs(eb[k] - z) < bd) {
                    bd = std::abs(eb[k] - z);
                    best = k;
                }
            used[best] = true;
            worst = std::max(worst, bd);
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("singular values are invariant under orthogonal factors") {
    std::mt19937_64 rng(0x829);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = pick(rng, 2, 8);
        const Matrix a = testutil::random_matrix(rng, n, n);
        const Vector s = singular_values(a);
        const Vector t = singular_values(testutil::random_orthogonal(rng, n) * a * testutil::random_orthogonal(rng, n));
        CHECK(max_abs_diff(s, t) < 1e-10 * std::max(1.0, s.front()));
    }
}

}  // TEST_SUITE

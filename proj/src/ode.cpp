#include "ibrt/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibrt/ba.hpp"
#include "ibrt/deriv.hpp"
#include "ibrt/error.hpp"
#include "ibrt/numerics.hpp"

namespace ibrt {

Vector ib_ode_rhs_printed(const DecoderRoot& root, const IBProblem& prob, double beta) {
    const BACycle c = ba_cycle(root, prob, beta);
    const std::size_t T = root.clusters();
    const std::size_t ny = prob.ny();
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    const LogLayout L{T, ny};
    Vector rhs(L.size(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double bottom = 0.0;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t u = 0; u < T; ++u)
                bottom += ((t == u ? 1.0 : 0.0) - c.encoder.p(u, x)) * c.inverse_encoder(x, t) * c.divergence(x, u);
        rhs[L.mrg(t)] = bottom;
        for (std::size_t y = 0; y < ny; ++y) {
            double top = 0.0;
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t u = 0; u < T; ++u)
                    top += (1.0 - pyx(y, x) / c.root.decoders(y, t)) * ((t == u ? 1.0 : 0.0) - c.encoder.p(u, x)) *
                           c.inverse_encoder(x, t) * c.divergence(x, u);
            rhs[L.dec(y, t)] = -top;
        }
    }
    return rhs;
}

OdeSolution solve_ib_ode_unguarded(const DecoderRoot& root, const IBProblem& prob, double beta) {
    const BAJacobian jac = ba_jacobian_independent(root, prob, beta);
    const std::size_t n = jac.layout.size();
    Matrix a = Matrix::identity(n) - jac.m;

    const Vector printed = ib_ode_rhs_printed(root, prob, beta);
    const Vector partials = beta_partials_log_decoder(root, prob, beta);
    OdeSolution sol;
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = -printed[i];
        sol.rhs_mismatch = std::max(sol.rhs_mismatch, std::abs(printed[i] + partials[i]));
    }
    const Matrix s = s_matrix(root, prob, beta);
    sol.singular_metric = sigma_min(Matrix::identity(s.rows()) - s);
    const LinearSolveReport rep = lu_solve(a, rhs);
    sol.v = rep.solution;
    sol.condition = rep.condition;
    return sol;
}

OdeSolution solve_ib_ode(const DecoderRoot& root, const IBProblem& prob, double beta, double delta3) {
    const Matrix s = s_matrix(root, prob, beta);
    const double metric = sigma_min(Matrix::identity(s.rows()) - s);
    if (metric < delta3)
        throw NearBifurcation(metric, "IB ODE refused: sigma_min(I - S) = " + std::to_string(metric) +
                                          " is below " + std::to_string(delta3));
    return solve_ib_ode_unguarded(root, prob, beta);
}

}  // namespace ibrt

#pragma once

#include "ibrt/matrix.hpp"
#include "ibrt/probability.hpp"

namespace ibrt {

inline constexpr double kDefaultDelta3 = 1e-2;

struct OdeSolution {
    Vector v;                    ///< d log p(y|xhat)/dbeta (cluster-major), then d log p(xhat)/dbeta
    double condition = 0.0;      ///< 1-norm condition estimate of I - J
    double singular_metric = 0.0;  ///< sigma_min(I - S)
    double rhs_mismatch = 0.0;   ///< |printed right-hand side + beta partials|_inf
};

/// Right-hand side of the implicit ODE written term by term in its printed form.
Vector ib_ode_rhs_printed(const DecoderRoot& root, const IBProblem& prob, double beta);

/// Solves (I - J) v = d_beta BA at a root. Throws NearBifurcation when
/// sigma_min(I - S) < delta3.
OdeSolution solve_ib_ode(const DecoderRoot& root, const IBProblem& prob, double beta,
                         double delta3 = kDefaultDelta3);

/// Same solve without the bifurcation guard; the singular metric is still reported.
OdeSolution solve_ib_ode_unguarded(const DecoderRoot& root, const IBProblem& prob, double beta);

}  // namespace ibrt

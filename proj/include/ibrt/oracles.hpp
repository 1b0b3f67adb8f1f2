#pragma once

#include <cstddef>

#include "ibrt/matrix.hpp"
#include "ibrt/probability.hpp"

namespace ibrt {

/// Symmetric binary channel with crossover alpha and uniform input.
IBProblem bsc_problem(double alpha);

/// Critical inverse temperature 1 / (1 - 2 alpha)^2.
double bsc_beta_c(double alpha);

/// Exact optimal root of the binary symmetric channel.
struct BscSolution {
    double alpha = 0.0;
    double beta = 0.0;
    double beta_c = 0.0;
    double delta = 0.5;  ///< p(xhat_1 | x_0)
    double t = 0.0;      ///< 1 - 2 delta
    Encoder encoder;     ///< 2 clusters; identical rows at or below beta_c
    DecoderRoot root;    ///< 2 clusters with mass 1/2 each

    bool trivial() const noexcept { return t == 0.0; }
    InfoPoint info() const;
};

/// For beta <= beta_c the trivial solution (delta = 1/2) is returned on two
/// coincident clusters; otherwise delta in (0, 1/2) solves the fixed-point
/// condition by bisection.
BscSolution bsc_exact_root(double alpha, double beta);

struct BscDerivative {
    Vector log_decoder;  ///< d/dbeta of log-decoder coordinates (marginal part zero)
    Matrix decoder;      ///< d p(y|xhat)/dbeta, |Y| x T
    Matrix encoder;      ///< d p(xhat|x)/dbeta, T x |X|
    Matrix log_encoder;  ///< d log p(xhat|x)/dbeta
    double dt_dbeta = 0.0;
};

/// Closed-form beta derivative of the exact solution. Throws BranchError for beta <= beta_c.
BscDerivative bsc_exact_derivative(double alpha, double beta);

/// Exact information curve of the channel: ln 2 - h(alpha * h^-1(ln 2 - i_x)).
/// Throws RangeError outside [0, ln 2].
double mrs_gerber_curve(double alpha, double i_x);

/// Inverse of the binary entropy on [0, 1/2].
double inverse_binary_entropy(double h);

/// p(y|x) = identity on two symbols, p(x) = (0.3, 0.7).
IBProblem decomposable_problem();
/// Single-cluster root at p(y).
DecoderRoot decomposable_trivial_root(double beta);
/// Boundary root: decoders (1,0), (0,1), masses (0.3, 0.7).
DecoderRoot decomposable_boundary_root(double beta);
/// Trivial root represented on two coincident clusters with masses (0.4, 0.6).
DecoderRoot decomposable_degenerate_root(double beta);

struct BruteForceResult {
    Encoder encoder;
    double lagrangian = 0.0;       ///< I(X;Xhat) - beta I(Y;Xhat) after polishing
    double grid_lagrangian = 0.0;  ///< best value on the grid
};

/// Exhaustive grid search over per-column encoder simplices followed by BA
/// polishing. Limits: |X| <= 3, T <= 2, resolution <= 201.
BruteForceResult brute_force_root(const IBProblem& prob, double beta, std::size_t clusters,
                                  std::size_t resolution);

}  // namespace ibrt

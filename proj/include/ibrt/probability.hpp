#pragma once

#include <cstddef>

#include "ibrt/matrix.hpp"

namespace ibrt {

/// Column-normalization tolerance used by every validating constructor.
inline constexpr double kNormTol = 1e-12;

/// Finite IB problem given by p(y|x) (|Y| x |X|, column x is p(.|x)) and p(x).
class IBProblem {
public:
    /// Validates shapes, column sums and p(x) > 0. Throws InputError naming
    /// the offending column on failure.
    static IBProblem make(Matrix p_y_given_x, Vector p_x);

    const Matrix& p_y_given_x() const noexcept { return pyx_; }
    const Vector& p_x() const noexcept { return px_; }
    std::size_t nx() const noexcept { return px_.size(); }
    std::size_t ny() const noexcept { return pyx_.rows(); }
    /// Every entry of p(y|x) is > 0.
    bool strictly_positive() const noexcept { return strictly_positive_; }
    /// Marginal p(y).
    const Vector& p_y() const noexcept { return py_; }

private:
    IBProblem() = default;
    Matrix pyx_;
    Vector px_;
    Vector py_;
    bool strictly_positive_ = false;
};

/// Encoder p(xhat|x), T x |X|.
struct Encoder {
    Matrix p;

    std::size_t clusters() const noexcept { return p.rows(); }
    /// Throws InputError unless every column is a distribution.
    void validate() const;
};

/// Decoders p(y|xhat) (|Y| x T, column per cluster) and marginal p(xhat).
struct DecoderRoot {
    Matrix decoders;
    Vector marginal;
    double beta = 0.0;

    std::size_t clusters() const noexcept { return marginal.size(); }
    std::size_t ny() const noexcept { return decoders.rows(); }
    void validate() const;
};

/// Information-plane point, both coordinates in nats.
struct InfoPoint {
    double i_x = 0.0;
    double i_y = 0.0;
};

/// Sum p_i ln(p_i/q_i) with 0 ln 0 = 0. Throws DivergenceInfinite when p_i > 0 = q_i.
double kl_divergence(const Vector& p, const Vector& q);

/// Shannon entropy in nats.
double entropy(const Vector& p);

/// h(a) = -a ln a - (1-a) ln(1-a).
double binary_entropy(double a);

/// a*b = a(1-b) + b(1-a).
double binary_convolution(double a, double b);

/// Cluster marginal p(xhat) = sum_x p(xhat|x) p(x).
Vector cluster_marginal(const Encoder& enc, const IBProblem& prob);

/// (I(X;Xhat), I(Y;Xhat)) with the decoder obtained from the Markov chain Y-X-Xhat.
InfoPoint mutual_informations(const Encoder& enc, const IBProblem& prob);

/// Converts nats to bits.
inline double to_bits(double nats) { return nats / 0.69314718055994530942; }

}  // namespace ibrt

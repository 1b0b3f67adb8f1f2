#include "ibrt/probability.hpp"

#include <cmath>
#include <string>

#include "ibrt/error.hpp"

namespace ibrt {

namespace {

void check_columns(const Matrix& m, const char* what) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double v = m(r, c);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw InputError(std::string(what) + ": column " + std::to_string(c) +
                                 " has a negative or non-finite entry");
            s += v;
        }
        if (std::abs(s - 1.0) > kNormTol)
            throw InputError(std::string(what) + ": column " + std::to_string(c) +
                             " is not normalized (sum " + std::to_string(s) + ")");
    }
}

}  // namespace

IBProblem IBProblem::make(Matrix p_y_given_x, Vector p_x) {
    if (p_x.empty() || p_y_given_x.rows() == 0)
        throw ShapeError("IBProblem: empty alphabet");
    if (p_y_given_x.cols() != p_x.size())
        throw ShapeError("IBProblem: p_y_given_x has " + std::to_string(p_y_given_x.cols()) +
                         " columns but p_x has " + std::to_string(p_x.size()) + " entries");
    check_columns(p_y_given_x, "p_y_given_x");
    double s = 0.0;
    for (std::size_t i = 0; i < p_x.size(); ++i) {
        if (!(p_x[i] > 0.0) || !std::isfinite(p_x[i]))
            throw InputError("p_x: entry " + std::to_string(i) + " must be strictly positive");
        s += p_x[i];
    }
    if (std::abs(s - 1.0) > kNormTol)
        throw InputError("p_x is not normalized (sum " + std::to_string(s) + ")");

    IBProblem prob;
    prob.pyx_ = std::move(p_y_given_x);
    prob.px_ = std::move(p_x);
    prob.strictly_positive_ = true;
    for (double v : prob.pyx_.data())
        if (v <= 0.0) prob.strictly_positive_ = false;
    prob.py_ = prob.pyx_ * prob.px_;
    return prob;
}

void Encoder::validate() const {
    if (p.rows() == 0) throw ShapeError("encoder has no clusters");
    check_columns(p, "encoder");
}

void DecoderRoot::validate() const {
    if (marginal.empty()) throw EmptyRoot("root has no clusters");
    if (decoders.cols() != marginal.size())
        throw ShapeError("root: decoder/marginal cluster counts differ");
    check_columns(decoders, "decoder");
    double s = 0.0;
    for (std::size_t i = 0; i < marginal.size(); ++i) {
        if (!(marginal[i] >= 0.0))
            throw InputError("marginal entry " + std::to_string(i) + " is negative");
        s += marginal[i];
    }
    if (std::abs(s - 1.0) > kNormTol) throw InputError("marginal is not normalized");
}

double kl_divergence(const Vector& p, const Vector& q) {
    if (p.size() != q.size()) throw ShapeError("kl_divergence: length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0)
            throw DivergenceInfinite("kl_divergence: q vanishes at index " + std::to_string(i) +
                                     " where p does not");
        d += p[i] * std::log(p[i] / q[i]);
    }
    return d < 0.0 ? 0.0 : d;
}

double entropy(const Vector& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double binary_entropy(double a) { return entropy({a, 1.0 - a}); }

double binary_convolution(double a, double b) { return a * (1.0 - b) + b * (1.0 - a); }

Vector cluster_marginal(const Encoder& enc, const IBProblem& prob) {
    if (enc.p.cols() != prob.nx()) throw ShapeError("encoder/problem alphabet mismatch");
    return enc.p * prob.p_x();
}

InfoPoint mutual_informations(const Encoder& enc, const IBProblem& prob) {
    const Vector m = cluster_marginal(enc, prob);
    const Matrix& pyx = prob.p_y_given_x();
    const Vector& px = prob.p_x();
    const std::size_t T = enc.clusters();

    double ix = 0.0;
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t x = 0; x < prob.nx(); ++x) {
            const double e = enc.p(t, x);
            if (e > 0.0) ix += px[x] * e * std::log(e / m[t]);
        }

    // I(Y;Xhat) = sum_xhat p(xhat) KL[p(y|xhat) || p(y)]
    double iy = 0.0;
    const Vector& py = prob.p_y();
    for (std::size_t t = 0; t < T; ++t) {
        if (m[t] <= 0.0) continue;
        Vector dec(prob.ny(), 0.0);
        for (std::size_t x = 0; x < prob.nx(); ++x) {
            const double w = enc.p(t, x) * px[x] / m[t];
            for (std::size_t y = 0; y < prob.ny(); ++y) dec[y] += pyx(y, x) * w;
        }
        iy += m[t] * kl_divergence(dec, py);
    }
    return {ix < 0.0 ? 0.0 : ix, iy < 0.0 ? 0.0 : iy};
}

}  // namespace ibrt

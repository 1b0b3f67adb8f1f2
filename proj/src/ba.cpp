#include "ibrt/ba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "ibrt/error.hpp"

namespace ibrt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix divergences(const Matrix& decoders, const IBProblem& prob) {
    const Matrix& pyx = prob.p_y_given_x();
    const std::size_t T = decoders.cols();
    Matrix d(prob.nx(), T, 0.0);
    for (std::size_t x = 0; x < prob.nx(); ++x)
        for (std::size_t t = 0; t < T; ++t) {
            double s = 0.0;
            for (std::size_t y = 0; y < prob.ny(); ++y) {
                const double p = pyx(y, x);
                if (p <= 0.0) continue;
                const double q = decoders(y, t);
                if (q <= 0.0) {
                    s = kInf;
                    break;
                }
                s += p * (std::log(p) - std::log(std::max(q, kLogFloor)));
            }
            d(x, t) = s;
        }
    return d;
}

}  // namespace

Vector EncoderFromDecoder::partition() const {
    Vector z(log_partition.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::exp(log_partition[i]);
    return z;
}

DecoderFromEncoder decoder_from_encoder(const Encoder& enc, const IBProblem& prob) {
    if (enc.p.cols() != prob.nx()) throw ShapeError("encoder/problem alphabet mismatch");
    const std::size_t T = enc.clusters();
    const Matrix& pyx = prob.p_y_given_x();
    const Vector& px = prob.p_x();

    DecoderFromEncoder out;
    out.root.marginal = cluster_marginal(enc, prob);
    out.inverse_encoder = Matrix(prob.nx(), T, 0.0);
    out.root.decoders = Matrix(prob.ny(), T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double m = out.root.marginal[t];
        if (!(m > 0.0))
            throw ZeroMassCluster(t, "cluster " + std::to_string(t) + " has zero mass");
        for (std::size_t x = 0; x < prob.nx(); ++x) {
            const double w = enc.p(t, x) * px[x] / m;
            out.inverse_encoder(x, t) = w;
            if (w == 0.0) continue;
            for (std::size_t y = 0; y < prob.ny(); ++y) out.root.decoders(y, t) += pyx(y, x) * w;
        }
    }
    return out;
}

EncoderFromDecoder encoder_from_decoder(const DecoderRoot& root, const IBProblem& prob, double beta) {
    if (root.ny() != prob.ny()) throw ShapeError("root/problem label alphabet mismatch");
    if (root.decoders.cols() != root.marginal.size())
        throw ShapeError("root: decoder/marginal cluster counts differ");
    const std::size_t T = root.clusters();

    EncoderFromDecoder out;
    out.divergence = divergences(root.decoders, prob);
    out.encoder.p = Matrix(T, prob.nx(), 0.0);
    out.log_partition.assign(prob.nx(), 0.0);

    Vector expo(T);
    for (std::size_t x = 0; x < prob.nx(); ++x) {
        double top = -kInf;
        for (std::size_t t = 0; t < T; ++t) {
            const double m = root.marginal[t];
            const double d = out.divergence(x, t);
            expo[t] = (m > 0.0 && d < kInf) ? std::log(m) - beta * d : -kInf;
            top = std::max(top, expo[t]);
        }
        if (top == -kInf)
            throw DivergenceInfinite("symbol x=" + std::to_string(x) +
                                     " has infinite divergence to every cluster");
        double z = 0.0;
        for (std::size_t t = 0; t < T; ++t) z += std::exp(expo[t] - top);
        const double log_z = top + std::log(z);
        out.log_partition[x] = log_z;
        for (std::size_t t = 0; t < T; ++t) out.encoder.p(t, x) = std::exp(expo[t] - log_z);
    }
    return out;
}

EncoderFromDecoder encoder_from_decoder(const DecoderRoot& root, const IBProblem& prob) {
    return encoder_from_decoder(root, prob, root.beta);
}

BACycle ba_cycle(const DecoderRoot& root, const IBProblem& prob, double beta) {
    EncoderFromDecoder e = encoder_from_decoder(root, prob, beta);
    DecoderFromEncoder d = decoder_from_encoder(e.encoder, prob);
    BACycle c;
    c.encoder = std::move(e.encoder);
    c.log_partition = std::move(e.log_partition);
    c.divergence = std::move(e.divergence);
    c.inverse_encoder = std::move(d.inverse_encoder);
    c.root = std::move(d.root);
    c.root.beta = beta;
    return c;
}

DecoderRoot ba_step_decoder(const DecoderRoot& root, const IBProblem& prob, double beta) {
    return ba_cycle(root, prob, beta).root;
}

BAResult ba_iterate(const Encoder& init, const IBProblem& prob, double beta, double stop,
                    std::size_t max_iter) {
    if (!(stop > 0.0)) throw InputError("ba_iterate: stop must be positive");
    if (max_iter < 1) throw InputError("ba_iterate: max_iter must be at least 1");
    init.validate();

    Encoder enc = init;
    DecoderFromEncoder dec = decoder_from_encoder(enc, prob);
    BAResult res;
    while (res.iterations < max_iter) {
        dec.root.beta = beta;
        Encoder next = encoder_from_decoder(dec.root, prob, beta).encoder;
        res.final_change = max_abs_diff(next.p, enc.p);
        enc = std::move(next);
        dec = decoder_from_encoder(enc, prob);
        ++res.iterations;
        if (res.final_change < stop) {
            res.converged = true;
            break;
        }
    }
    res.encoder = std::move(enc);
    res.root = std::move(dec.root);
    res.root.beta = beta;
    res.inverse_encoder = std::move(dec.inverse_encoder);
    return res;
}

Encoder uniform_encoder(std::size_t clusters, std::size_t nx) {
    if (clusters == 0 || nx == 0) throw ShapeError("uniform_encoder: empty shape");
    Encoder e{Matrix(clusters, nx, 1.0)};
    if (clusters == 1) return e;
    for (std::size_t x = 0; x < nx; ++x) {
        e.p(x % clusters, x) += 0.5;
        const double s = static_cast<double>(clusters) + 0.5;
        for (std::size_t t = 0; t < clusters; ++t) e.p(t, x) /= s;
    }
    return e;
}

Encoder random_encoder(std::size_t clusters, std::size_t nx, std::uint64_t seed) {
    if (clusters == 0 || nx == 0) throw ShapeError("random_encoder: empty shape");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Encoder e{Matrix(clusters, nx)};
    for (std::size_t x = 0; x < nx; ++x) {
        double s = 0.0;
        for (std::size_t t = 0; t < clusters; ++t) s += (e.p(t, x) = unif(rng));
        for (std::size_t t = 0; t < clusters; ++t) e.p(t, x) /= s;
    }
    return e;
}

}  // namespace ibrt

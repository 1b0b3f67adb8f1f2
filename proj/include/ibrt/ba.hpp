#pragma once

#include <cstddef>
#include <cstdint>

#include "ibrt/matrix.hpp"
#include "ibrt/probability.hpp"

namespace ibrt {

/// Floor applied to decoder entries before taking logarithms.
inline constexpr double kLogFloor = 1e-300;

inline constexpr double kDefaultBaStop = 1e-8;
inline constexpr std::size_t kDefaultBaMaxIter = 100000;

struct DecoderFromEncoder {
    DecoderRoot root;         ///< beta left at 0; callers stamp it
    Matrix inverse_encoder;   ///< p(x|xhat), |X| x T
};

struct EncoderFromDecoder {
    Encoder encoder;
    Vector log_partition;     ///< ln Z(x, beta)
    Matrix divergence;        ///< KL[p(y|x) || p(y|xhat)], |X| x T; +inf where unsupported

    Vector partition() const;  ///< Z(x, beta); may underflow for large beta
};

/// Marginal, inverse encoder and decoder of an encoder. Throws ZeroMassCluster.
DecoderFromEncoder decoder_from_encoder(const Encoder& enc, const IBProblem& prob);

/// Encoder p(xhat) exp(-beta D) / Z. Pairs with an infinite divergence get
/// weight zero; a symbol x left with no admissible cluster raises DivergenceInfinite.
/// The input is used as given, without renormalization.
EncoderFromDecoder encoder_from_decoder(const DecoderRoot& root, const IBProblem& prob, double beta);
EncoderFromDecoder encoder_from_decoder(const DecoderRoot& root, const IBProblem& prob);

/// One decoder -> encoder -> decoder pass with every intermediate kept.
struct BACycle {
    Encoder encoder;
    Vector log_partition;
    Matrix divergence;        ///< divergences against the input decoder
    Matrix inverse_encoder;
    DecoderRoot root;         ///< output root, beta stamped
};

BACycle ba_cycle(const DecoderRoot& root, const IBProblem& prob, double beta);

/// One BA iteration in decoder coordinates.
DecoderRoot ba_step_decoder(const DecoderRoot& root, const IBProblem& prob, double beta);

struct BAResult {
    DecoderRoot root;
    Encoder encoder;
    Matrix inverse_encoder;
    std::size_t iterations = 0;
    bool converged = false;
    double final_change = 0.0;  ///< L-infinity change of the encoder in the last iteration
};

/// Iterates BA from an encoder until the encoder moves less than `stop` in
/// L-infinity, or `max_iter` iterations have run.
BAResult ba_iterate(const Encoder& init, const IBProblem& prob, double beta,
                    double stop = kDefaultBaStop, std::size_t max_iter = kDefaultBaMaxIter);

/// Near-uniform start: p(xhat|x) proportional to 1 + 0.5 [xhat == x mod T].
/// An exactly uniform encoder is a BA fixed point, so a slight tilt is needed.
Encoder uniform_encoder(std::size_t clusters, std::size_t nx);

/// Entries drawn uniformly from (0.05, 1] and normalized per column.
Encoder random_encoder(std::size_t clusters, std::size_t nx, std::uint64_t seed);

}  // namespace ibrt

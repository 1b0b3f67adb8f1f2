#pragma once

#include <cstddef>

#include "ibrt/ba.hpp"
#include "ibrt/matrix.hpp"
#include "ibrt/probability.hpp"

namespace ibrt {

/// Flat layout of log-decoder coordinates: decoder entry (y, xhat) sits at
/// xhat * |Y| + y, marginal xhat at T * |Y| + xhat.
struct LogLayout {
    std::size_t clusters = 0;
    std::size_t ny = 0;

    std::size_t dec(std::size_t y, std::size_t xhat) const { return xhat * ny + y; }
    std::size_t mrg(std::size_t xhat) const { return clusters * ny + xhat; }
    std::size_t decoder_size() const { return clusters * ny; }
    std::size_t size() const { return clusters * (ny + 1); }
};

/// Log coordinates of a root. Throws SupportError on a vanishing entry.
Vector to_log_coords(const DecoderRoot& root);
/// Exponentiates flat log coordinates without renormalizing.
DecoderRoot from_log_coords(const Vector& z, const LogLayout& layout, double beta);

/// Two-cluster tensors A, B, C and the per-cluster D, built from the
/// distributions one BA step produces from the evaluation root.
struct DerivTensors {
    std::size_t clusters = 0;
    std::size_t ny = 0;
    double beta = 0.0;
    BACycle cycle;  ///< encoder, inverse encoder and decoder used by the tensors
    Matrix a;       ///< A(xhat, xhat')
    Vector b_flat;
    Vector c_flat;
    Vector d_flat;

    double A(std::size_t t, std::size_t u) const { return a(t, u); }
    double B(std::size_t t, std::size_t u, std::size_t y) const { return b_flat[(t * clusters + u) * ny + y]; }
    double C(std::size_t t, std::size_t u, std::size_t y, std::size_t y2) const {
        return c_flat[((t * clusters + u) * ny + y) * ny + y2];
    }
    double D(std::size_t t, std::size_t y, std::size_t y2) const { return d_flat[(t * ny + y) * ny + y2]; }
    /// Decoder p(y|xhat) the tensors are normalized against.
    double decoder(std::size_t y, std::size_t t) const { return cycle.root.decoders(y, t); }
};

DerivTensors deriv_tensors(const DecoderRoot& root, const IBProblem& prob, double beta);
DerivTensors deriv_tensors(const DecoderRoot& root, const IBProblem& prob);

struct BAJacobian {
    LogLayout layout;
    Matrix m;  ///< rows index outputs, columns inputs
};

/// Jacobian of one BA step in log-decoder coordinates (block form assembled
/// from DerivTensors). Its marginal columns carry the factor (1 - beta): they
/// treat the input decoder as varying with the marginal. This is the form
/// whose unit eigenvalues match those of S. Requires strictly positive
/// decoders and marginals.
BAJacobian ba_jacobian_log_decoder(const DecoderRoot& root, const IBProblem& prob, double beta);

/// Same blocks with every log coordinate varied independently (marginal
/// factor 1). Agrees with fd_jacobian_log_decoder column by column; this is
/// the matrix the ODE solve uses.
BAJacobian ba_jacobian_independent(const DecoderRoot& root, const IBProblem& prob, double beta);

/// Partial derivative of one BA step in beta, log-decoder coordinates.
Vector beta_partials_log_decoder(const DecoderRoot& root, const IBProblem& prob, double beta);

/// Order T|Y| matrix whose unit eigenvalues match those of the BA Jacobian.
Matrix s_matrix(const DecoderRoot& root, const IBProblem& prob, double beta);

/// Extends a decoder-part vector v (T|Y|) by u_xhat = (1-beta)/beta sum_y v_{y,xhat}.
Vector kernel_lift(const Vector& v, std::size_t ny, double beta);

/// C_X(xhat)_{x,x'} = sum_y p(y|x) p(y|x') p(x'|xhat) / p(y|xhat).
Matrix cx_matrix(const DecoderRoot& root, const IBProblem& prob, std::size_t cluster, double beta);
Matrix cx_matrix(const DecoderRoot& root, const IBProblem& prob, std::size_t cluster);

/// The same condition written through joint distributions; equals cx_matrix transposed.
Matrix v_matrix(const DecoderRoot& root, const IBProblem& prob, std::size_t cluster, double beta);

/// True when some eigenvalue of C_X lies within `tol` of 1/beta.
bool cx_has_inverse_beta_eigenvalue(const Matrix& cx, double beta, double tol);

/// Largest real part among the eigenvalues of beta * C_X.
double cx_leading_scaled_eigenvalue(const Matrix& cx, double beta);

/// Coordinate exchange Jacobians from (decoder, marginal) to encoder, at the
/// encoder one BA step produces.
struct DecToEncJacobians {
    Matrix dec;            ///< (xhat*|X| + x) x (decoder coords), beta p(y'|x)[delta - p(xhat'|x)]
    Matrix mrg_printed;    ///< (1 - beta)[delta - p(xhat'|x)], decoder recomputed from the encoder
    Matrix mrg_direct;     ///< [delta - p(xhat'|x)], decoder held fixed
    Matrix beta_partial;   ///< T x |X|
};

DecToEncJacobians dec_to_enc_jacobians(const DecoderRoot& root, const IBProblem& prob, double beta);

/// d log p(xhat|x)/d beta (T x |X|) from the log-decoder derivative v.
/// Uses the decoder-held-fixed marginal Jacobian, which composes with total derivatives.
Matrix exchange_dec_to_enc(const Vector& v, const DecoderRoot& root, const IBProblem& prob, double beta);

/// Log-decoder derivative from d log p(xhat|x)/d beta, through the encoder's
/// marginal and inverse encoder.
Vector exchange_enc_to_dec(const Matrix& v_enc, const Encoder& enc, const IBProblem& prob);
/// As above, at the encoder one BA step at `beta` produces from `root`.
Vector exchange_enc_to_dec(const Matrix& v_enc, const DecoderRoot& root, const IBProblem& prob, double beta);

/// Central differences of one BA step in log coordinates, column per input coordinate.
Matrix fd_jacobian_log_decoder(const DecoderRoot& root, const IBProblem& prob, double beta, double h = 1e-6);
/// Central differences of one BA step in beta.
Vector fd_beta_partials(const DecoderRoot& root, const IBProblem& prob, double beta, double h = 1e-6);

}  // namespace ibrt

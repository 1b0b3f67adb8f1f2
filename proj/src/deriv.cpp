#include "ibrt/deriv.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ibrt/error.hpp"
#include "ibrt/numerics.hpp"

namespace ibrt {

namespace {

void require_positive(const DecoderRoot& root, const char* what) {
    for (std::size_t t = 0; t < root.clusters(); ++t) {
        if (!(root.marginal[t] > 0.0))
            throw SupportError(std::string(what) + ": marginal of cluster " + std::to_string(t) + " vanishes");
        for (std::size_t y = 0; y < root.ny(); ++y)
            if (!(root.decoders(y, t) > 0.0))
                throw SupportError(std::string(what) + ": decoder entry (" + std::to_string(y) + ", " +
                                   std::to_string(t) + ") vanishes");
    }
}

Vector step_log(const Vector& z, const LogLayout& lay, const IBProblem& prob, double beta) {
    return to_log_coords(ba_step_decoder(from_log_coords(z, lay, beta), prob, beta));
}

}  // namespace

Vector to_log_coords(const DecoderRoot& root) {
    require_positive(root, "to_log_coords");
    const LogLayout lay{root.clusters(), root.ny()};
    Vector z(lay.size());
    for (std::size_t t = 0; t < lay.clusters; ++t) {
        for (std::size_t y = 0; y < lay.ny; ++y) z[lay.dec(y, t)] = std::log(root.decoders(y, t));
        z[lay.mrg(t)] = std::log(root.marginal[t]);
    }
    return z;
}

DecoderRoot from_log_coords(const Vector& z, const LogLayout& lay, double beta) {
    if (z.size() != lay.size()) throw ShapeError("from_log_coords: length mismatch");
    DecoderRoot r{Matrix(lay.ny, lay.clusters), Vector(lay.clusters), beta};
    for (std::size_t t = 0; t < lay.clusters; ++t) {
        for (std::size_t y = 0; y < lay.ny; ++y) r.decoders(y, t) = std::exp(z[lay.dec(y, t)]);
        r.marginal[t] = std::exp(z[lay.mrg(t)]);
    }
    return r;
}

DerivTensors deriv_tensors(const DecoderRoot& root, const IBProblem& prob, double beta) {
    DerivTensors dt;
    dt.cycle = ba_cycle(root, prob, beta);
    const std::size_t T = root.clusters();
    const std::size_t ny = prob.ny();
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    const Matrix& enc = dt.cycle.encoder.p;
    const Matrix& inv = dt.cycle.inverse_encoder;
    dt.clusters = T;
    dt.ny = ny;
    dt.beta = beta;
    dt.a = Matrix(T, T, 0.0);
    dt.b_flat.assign(T * T * ny, 0.0);
    dt.c_flat.assign(T * T * ny * ny, 0.0);
    dt.d_flat.assign(T * ny * ny, 0.0);

    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t x = 0; x < nx; ++x) {
            const double w = inv(x, t);
            if (w == 0.0) continue;
            for (std::size_t y = 0; y < ny; ++y)
                for (std::size_t y2 = 0; y2 < ny; ++y2)
                    dt.d_flat[(t * ny + y) * ny + y2] += pyx(y, x) * pyx(y2, x) * w;
            for (std::size_t u = 0; u < T; ++u) {
                const double wu = enc(u, x) * w;
                dt.a(t, u) += wu;
                for (std::size_t y = 0; y < ny; ++y) {
                    dt.b_flat[(t * T + u) * ny + y] += pyx(y, x) * wu;
                    for (std::size_t y2 = 0; y2 < ny; ++y2)
                        dt.c_flat[((t * T + u) * ny + y) * ny + y2] += pyx(y, x) * pyx(y2, x) * wu;
                }
            }
        }
        for (std::size_t y = 0; y < ny; ++y) {
            const double q = dt.decoder(y, t);
            for (std::size_t y2 = 0; y2 < ny; ++y2) {
                double& d = dt.d_flat[(t * ny + y) * ny + y2];
                d = q > 0.0 ? d / q : 0.0;
            }
        }
    }
    return dt;
}

DerivTensors deriv_tensors(const DecoderRoot& root, const IBProblem& prob) {
    return deriv_tensors(root, prob, root.beta);
}

namespace {

BAJacobian assemble_jacobian(const DecoderRoot& root, const IBProblem& prob, double beta, double mrg_factor,
                             const char* what) {
    require_positive(root, what);
    const DerivTensors dt = deriv_tensors(root, prob, beta);
    require_positive(dt.cycle.root, what);
    const std::size_t T = dt.clusters;
    const std::size_t ny = dt.ny;
    BAJacobian jac{LogLayout{T, ny}, Matrix(T * (ny + 1), T * (ny + 1), 0.0)};
    const LogLayout& L = jac.layout;
    Matrix& J = jac.m;

    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t u = 0; u < T; ++u) {
            const double same = t == u ? 1.0 : 0.0;
            for (std::size_t y = 0; y < ny; ++y) {
                const double q = dt.decoder(y, t);
                for (std::size_t y2 = 0; y2 < ny; ++y2)
                    J(L.dec(y, t), L.dec(y2, u)) =
                        beta * (dt.B(t, u, y2) - same * dt.decoder(y2, t) + same * dt.D(t, y, y2) -
                                dt.C(t, u, y, y2) / q);
                J(L.dec(y, t), L.mrg(u)) = mrg_factor * (dt.A(t, u) - dt.B(t, u, y) / q);
            }
            for (std::size_t y2 = 0; y2 < ny; ++y2)
                J(L.mrg(t), L.dec(y2, u)) = beta * (same * dt.decoder(y2, t) - dt.B(t, u, y2));
            J(L.mrg(t), L.mrg(u)) = mrg_factor * (same - dt.A(t, u));
        }
    return jac;
}

}  // namespace

BAJacobian ba_jacobian_log_decoder(const DecoderRoot& root, const IBProblem& prob, double beta) {
    return assemble_jacobian(root, prob, beta, 1.0 - beta, "ba_jacobian_log_decoder");
}

BAJacobian ba_jacobian_independent(const DecoderRoot& root, const IBProblem& prob, double beta) {
    return assemble_jacobian(root, prob, beta, 1.0, "ba_jacobian_independent");
}

Vector beta_partials_log_decoder(const DecoderRoot& root, const IBProblem& prob, double beta) {
    require_positive(root, "beta_partials_log_decoder");
    const BACycle c = ba_cycle(root, prob, beta);
    const std::size_t T = root.clusters();
    const std::size_t ny = prob.ny();
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    const LogLayout L{T, ny};

    // w(x, xhat) = sum_xhat'' [delta - p(xhat''|x)] KL(x, xhat'')
    Matrix w(nx, T, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
        double mean = 0.0;
        for (std::size_t u = 0; u < T; ++u) mean += c.encoder.p(u, x) * c.divergence(x, u);
        for (std::size_t t = 0; t < T; ++t) w(x, t) = c.divergence(x, t) - mean;
    }
    Vector out(L.size(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double mrg = 0.0;
        for (std::size_t x = 0; x < nx; ++x) mrg += c.inverse_encoder(x, t) * w(x, t);
        out[L.mrg(t)] = -mrg;
        for (std::size_t y = 0; y < ny; ++y) {
            const double q = c.root.decoders(y, t);
            double s = 0.0;
            for (std::size_t x = 0; x < nx; ++x)
                s += (1.0 - pyx(y, x) / q) * c.inverse_encoder(x, t) * w(x, t);
            out[L.dec(y, t)] = s;
        }
    }
    return out;
}

Matrix s_matrix(const DecoderRoot& root, const IBProblem& prob, double beta) {
    require_positive(root, "s_matrix");
    const BACycle c = ba_cycle(root, prob, beta);
    const std::size_t T = root.clusters();
    const std::size_t ny = prob.ny();
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    const LogLayout L{T, ny};
    Matrix S(T * ny, T * ny, 0.0);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t y = 0; y < ny; ++y) {
            const double q = c.root.decoders(y, t);
            for (std::size_t x = 0; x < nx; ++x) {
                const double lead = c.inverse_encoder(x, t) * (beta * pyx(y, x) / q + 1.0 - 2.0 * beta);
                if (lead == 0.0) continue;
                for (std::size_t u = 0; u < T; ++u) {
                    const double g = lead * ((t == u ? 1.0 : 0.0) - c.encoder.p(u, x));
                    for (std::size_t y2 = 0; y2 < ny; ++y2) S(L.dec(y, t), L.dec(y2, u)) += g * pyx(y2, x);
                }
            }
        }
    return S;
}

Vector kernel_lift(const Vector& v, std::size_t ny, double beta) {
    if (ny == 0 || v.size() % ny != 0) throw ShapeError("kernel_lift: length is not a multiple of |Y|");
    if (!(beta > 0.0)) throw InputError("kernel_lift: beta must be positive");
    const std::size_t T = v.size() / ny;
    Vector out(v);
    out.resize(T * (ny + 1), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double s = 0.0;
        for (std::size_t y = 0; y < ny; ++y) s += v[t * ny + y];
        out[T * ny + t] = (1.0 - beta) / beta * s;
    }
    return out;
}

Matrix cx_matrix(const DecoderRoot& root, const IBProblem& prob, std::size_t cluster, double beta) {
    if (cluster >= root.clusters()) throw ShapeError("cx_matrix: cluster index out of range");
    const BACycle c = ba_cycle(root, prob, beta);
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    Matrix cx(nx, nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t x2 = 0; x2 < nx; ++x2) {
            double s = 0.0;
            for (std::size_t y = 0; y < prob.ny(); ++y) {
                const double q = c.root.decoders(y, cluster);
                if (q > 0.0) s += pyx(y, x) * pyx(y, x2) / q;
            }
            cx(x, x2) = s * c.inverse_encoder(x2, cluster);
        }
    return cx;
}

Matrix cx_matrix(const DecoderRoot& root, const IBProblem& prob, std::size_t cluster) {
    return cx_matrix(root, prob, cluster, root.beta);
}

Matrix v_matrix(const DecoderRoot& root, const IBProblem& prob, std::size_t cluster, double beta) {
    if (cluster >= root.clusters()) throw ShapeError("v_matrix: cluster index out of range");
    const BACycle c = ba_cycle(root, prob, beta);
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    const Vector& px = prob.p_x();
    const double m = c.root.marginal[cluster];
    if (!(m > 0.0)) throw ZeroMassCluster(cluster, "v_matrix: cluster has zero mass");
    Matrix v(nx, nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t x2 = 0; x2 < nx; ++x2) {
            double s = 0.0;
            for (std::size_t y = 0; y < prob.ny(); ++y) {
                const double joint_yt = c.root.decoders(y, cluster) * m;  // p(y, xhat)
                if (joint_yt > 0.0)
                    s += (pyx(y, x2) * px[x2]) * (pyx(y, x) * px[x]) * c.encoder.p(cluster, x) / (joint_yt * px[x2]);
            }
            v(x, x2) = s;
        }
    return v;
}

bool cx_has_inverse_beta_eigenvalue(const Matrix& cx, double beta, double tol) {
    const double target = 1.0 / beta;
    for (const auto& ev : eigenvalues(cx))
        if (std::abs(ev - target) <= tol) return true;
    return false;
}

double cx_leading_scaled_eigenvalue(const Matrix& cx, double beta) {
    // Skips the structural eigenvalue 1 (eigenvector all ones).
    const auto ev = eigenvalues(cx);
    double best = -std::numeric_limits<double>::infinity();
    bool skipped_unit = false;
    for (const auto& e : ev) {
        if (!skipped_unit && std::abs(e - 1.0) < 1e-9) {
            skipped_unit = true;
            continue;
        }
        best = std::max(best, beta * e.real());
    }
    return best;
}

DecToEncJacobians dec_to_enc_jacobians(const DecoderRoot& root, const IBProblem& prob, double beta) {
    const BACycle c = ba_cycle(root, prob, beta);
    const std::size_t T = root.clusters();
    const std::size_t ny = prob.ny();
    const std::size_t nx = prob.nx();
    const Matrix& pyx = prob.p_y_given_x();
    const LogLayout L{T, ny};
    DecToEncJacobians j{Matrix(T * nx, T * ny, 0.0), Matrix(T * nx, T, 0.0), Matrix(T * nx, T, 0.0),
                        Matrix(T, nx, 0.0)};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t x = 0; x < nx; ++x) {
            const std::size_t row = t * nx + x;
            double mean = 0.0;
            for (std::size_t u = 0; u < T; ++u) {
                const double g = (t == u ? 1.0 : 0.0) - c.encoder.p(u, x);
                for (std::size_t y = 0; y < ny; ++y) j.dec(row, L.dec(y, u)) = beta * pyx(y, x) * g;
                j.mrg_printed(row, u) = (1.0 - beta) * g;
                j.mrg_direct(row, u) = g;
                mean += c.encoder.p(u, x) * c.divergence(x, u);
            }
            j.beta_partial(t, x) = mean - c.divergence(x, t);
        }
    return j;
}

Matrix exchange_dec_to_enc(const Vector& v, const DecoderRoot& root, const IBProblem& prob, double beta) {
    const std::size_t T = root.clusters();
    const LogLayout L{T, prob.ny()};
    if (v.size() != L.size()) throw ShapeError("exchange_dec_to_enc: v has the wrong length");
    const DecToEncJacobians j = dec_to_enc_jacobians(root, prob, beta);
    const Vector vd(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(L.decoder_size()));
    const Vector vm(v.begin() + static_cast<std::ptrdiff_t>(L.decoder_size()), v.end());
    const Vector a = j.dec * vd;
    const Vector b = j.mrg_direct * vm;
    Matrix out(j.beta_partial);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t x = 0; x < prob.nx(); ++x) out(t, x) += a[t * prob.nx() + x] + b[t * prob.nx() + x];
    return out;
}

Vector exchange_enc_to_dec(const Matrix& v_enc, const Encoder& enc, const IBProblem& prob) {
    const std::size_t T = enc.clusters();
    if (v_enc.rows() != T || v_enc.cols() != prob.nx())
        throw ShapeError("exchange_enc_to_dec: v_enc must be T x |X|");
    const DecoderFromEncoder d = decoder_from_encoder(enc, prob);
    const Matrix& pyx = prob.p_y_given_x();
    const LogLayout L{T, prob.ny()};
    Vector out(L.size(), 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t x = 0; x < prob.nx(); ++x) out[L.mrg(t)] += d.inverse_encoder(x, t) * v_enc(t, x);
        for (std::size_t y = 0; y < prob.ny(); ++y) {
            const double q = d.root.decoders(y, t);
            if (!(q > 0.0)) throw SupportError("exchange_enc_to_dec: decoder entry vanishes");
            double s = 0.0;
            for (std::size_t x = 0; x < prob.nx(); ++x)
                s += (pyx(y, x) / q - 1.0) * d.inverse_encoder(x, t) * v_enc(t, x);
            out[L.dec(y, t)] = s;
        }
    }
    return out;
}

Vector exchange_enc_to_dec(const Matrix& v_enc, const DecoderRoot& root, const IBProblem& prob, double beta) {
    return exchange_enc_to_dec(v_enc, encoder_from_decoder(root, prob, beta).encoder, prob);
}

Matrix fd_jacobian_log_decoder(const DecoderRoot& root, const IBProblem& prob, double beta, double h) {
    const LogLayout L{root.clusters(), root.ny()};
    const Vector z = to_log_coords(root);
    Matrix J(L.size(), L.size(), 0.0);
    for (std::size_t k = 0; k < L.size(); ++k) {
        Vector zp(z), zm(z);
        zp[k] += h;
        zm[k] -= h;
        const Vector fp = step_log(zp, L, prob, beta);
        const Vector fm = step_log(zm, L, prob, beta);
        for (std::size_t r = 0; r < L.size(); ++r) J(r, k) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return J;
}

Vector fd_beta_partials(const DecoderRoot& root, const IBProblem& prob, double beta, double h) {
    const Vector fp = to_log_coords(ba_step_decoder(root, prob, beta + h));
    const Vector fm = to_log_coords(ba_step_decoder(root, prob, beta - h));
    Vector out(fp.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (fp[i] - fm[i]) / (2.0 * h);
    return out;
}

}  // namespace ibrt

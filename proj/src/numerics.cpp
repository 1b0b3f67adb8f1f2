#include "ibrt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ibrt/error.hpp"

namespace ibrt {

LU::LU(const Matrix& a) : n_(a.rows()), lu_(a), perm_(a.rows()) {
    if (!a.square()) throw ShapeError("LU: matrix must be square");
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    norm_one_ = a.norm_one();
    const double amax = a.max_abs();
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n_; ++r)
            if (std::abs(lu_(r, k)) > best) {
                best = std::abs(lu_(r, k));
                piv = r;
            }
        if (best == 0.0)
            throw SingularMatrix(k, "LU: zero pivot in column " + std::to_string(k));
        if (piv != k) {
            for (std::size_t c = 0; c < n_; ++c) std::swap(lu_(k, c), lu_(piv, c));
            std::swap(perm_[k], perm_[piv]);
        }
        const double d = lu_(k, k);
        for (std::size_t r = k + 1; r < n_; ++r) {
            const double f = (lu_(r, k) /= d);
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n_; ++c) lu_(r, c) -= f * lu_(k, c);
        }
    }
    double umax = 0.0;
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t c = r; c < n_; ++c) umax = std::max(umax, std::abs(lu_(r, c)));
    growth_ = amax > 0.0 ? umax / amax : 0.0;
}

Vector LU::solve(const Vector& b) const {
    if (b.size() != n_) throw ShapeError("LU::solve: length mismatch");
    Vector x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n_; i-- > 0;) {
        for (std::size_t j = i + 1; j < n_; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

Vector LU::solve_transpose(const Vector& b) const {
    if (b.size() != n_) throw ShapeError("LU::solve_transpose: length mismatch");
    // A = P^T L U, so A^T x = b means U^T L^T (P x) = b.
    Vector z(b);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) z[i] -= lu_(j, i) * z[j];
        z[i] /= lu_(i, i);
    }
    for (std::size_t i = n_; i-- > 0;)
        for (std::size_t j = i + 1; j < n_; ++j) z[i] -= lu_(j, i) * z[j];
    Vector x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[perm_[i]] = z[i];
    return x;
}

double LU::inverse_norm_one_estimate() const {
    if (n_ == 0) return 0.0;
    Vector x(n_, 1.0 / static_cast<double>(n_));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Vector y = solve(x);
        double ny = 0.0;
        for (double v : y) ny += std::abs(v);
        if (iter > 0 && ny <= est) break;
        est = ny;
        Vector xi(n_);
        for (std::size_t i = 0; i < n_; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        Vector z = solve_transpose(xi);
        std::size_t j = 0;
        for (std::size_t i = 1; i < n_; ++i)
            if (std::abs(z[i]) > std::abs(z[j])) j = i;
        double ztx = 0.0;
        for (std::size_t i = 0; i < n_; ++i) ztx += z[i] * x[i];
        if (iter > 0 && std::abs(z[j]) <= ztx) break;
        std::fill(x.begin(), x.end(), 0.0);
        x[j] = 1.0;
    }
    // Higham's alternating-sign test vector guards against underestimates.
    Vector alt(n_);
    for (std::size_t i = 0; i < n_; ++i)
        alt[i] = (i % 2 ? -1.0 : 1.0) *
                 (1.0 + static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n_ - 1, 1)));
    Vector w = solve(alt);
    double nw = 0.0;
    for (double v : w) nw += std::abs(v);
    return std::max(est, 2.0 * nw / (3.0 * static_cast<double>(n_)));
}

LinearSolveReport lu_solve(const Matrix& a, const Vector& b) {
    LU lu(a);
    LinearSolveReport r;
    r.solution = lu.solve(b);
    r.condition = lu.norm_one() * lu.inverse_norm_one_estimate();
    r.pivot_growth = lu.pivot_growth();
    return r;
}

SvdResult svd(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n) throw ShapeError("svd: matrix must have at least as many rows as columns");
    Matrix u(a);
    Matrix v = Matrix::identity(n);
    const double eps = 1e-15;
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double up = u(i, p), uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        if (!rotated) break;
    }
    Vector sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += u(i, j) * u(i, j);
        sig[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });
    SvdResult r{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        r.sigma[k] = sig[order[k]];
        for (std::size_t i = 0; i < n; ++i) r.v(i, k) = v(i, order[k]);
    }
    return r;
}

Vector singular_values(const Matrix& a) {
    if (a.rows() < a.cols()) return svd(a.transpose()).sigma;
    return svd(a).sigma;
}

double sigma_min(const Matrix& a) {
    if (!a.square()) throw ShapeError("sigma_min: matrix must be square");
    if (a.rows() == 0) return 0.0;
    return singular_values(a).back();
}

std::size_t numerical_nullity(const Matrix& a, double tol) {
    const Vector s = singular_values(a);
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](double x) { return x <= tol; }));
}

Vector left_null_vector(const Matrix& a) {
    if (!a.square()) throw ShapeError("left_null_vector: matrix must be square");
    const SvdResult r = svd(a.transpose());
    return r.v.column(r.v.cols() - 1);
}

namespace {

void balance(Matrix& a) {
    const double radix = 2.0;
    const double sqrdx = radix * radix;
    const std::size_t n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    Vector w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;
        if (a(k + 1, k) > 0.0) alpha = -alpha;
        std::fill(w.begin(), w.end(), 0.0);
        w[k + 1] = a(k + 1, k) - alpha;
        for (std::size_t i = k + 2; i < n; ++i) w[i] = a(i, k);
        double wn = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) wn += w[i] * w[i];
        if (wn == 0.0) continue;
        // A <- H A H with H = I - 2 w w^T / (w^T w)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += w[i] * a(i, j);
            s *= 2.0 / wn;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= s * w[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * w[j];
            s *= 2.0 / wn;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * w[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Double-shift QR on an upper Hessenberg matrix (eigenvalues only).
void hessenberg_qr(Matrix& a, Vector& wr, Vector& wi) {
    const int n = static_cast<int>(a.rows());
    const std::size_t cap = kEigenSweepFactor * a.rows();
    std::size_t sweeps = 0;
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) + s == s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -(wi[nn] = z);
                    }
                    nn -= 2;
                } else {
                    if (++sweeps > cap)
                        throw EigenNonConvergence(static_cast<std::size_t>(n - 1 - nn),
                                                  "eigenvalues: QR iteration did not converge");
                    if (its > 0 && its % 10 == 0) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        const double s0 = y - z;
                        p = (r * s0 - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s0;
                        r = a(m + 2, m + 1);
                        const double s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    if (!a.square()) throw ShapeError("eigenvalues: matrix must be square");
    const std::size_t n = a.rows();
    for (double v : a.data())
        if (!std::isfinite(v)) throw InputError("eigenvalues: non-finite matrix entry");
    Matrix h(a);
    balance(h);
    hessenberg(h);
    Vector wr(n, 0.0), wi(n, 0.0);
    hessenberg_qr(h, wr, wi);
    std::vector<std::complex<double>> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = {wr[i], wi[i]};
    std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return ev;
}

}  // namespace ibrt

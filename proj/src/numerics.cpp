#include "spikewhite/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spikewhite/errors.hpp"

namespace spikewhite {

CovarianceResult covariance(const Matrix& samples) {
    const std::size_t n = samples.rows();
    const std::size_t d = samples.cols();
    if (n < 2) {
        throw DataError("covariance: need at least 2 samples, got " + std::to_string(n));
    }

    CovarianceResult res;
    res.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = samples.row(i).data();
        for (std::size_t j = 0; j < d; ++j) {
            res.mean[j] += row[j];
        }
    }
    for (double& v : res.mean) {
        v /= static_cast<double>(n);
    }

    // Upper-triangle accumulation of centered outer products, then mirrored,
    // so the result is exactly symmetric.
    res.cov = Matrix(d, d);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = samples.row(i).data();
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = row[j] - res.mean[j];
        }
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = x[a];
            double* crow = res.cov.row(a).data();
            for (std::size_t b = a; b < d; ++b) {
                crow[b] += xa * x[b];
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            const double v = res.cov(a, b) * scale;
            res.cov(a, b) = v;
            res.cov(b, a) = v;
        }
    }
    return res;
}

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kSymmetryTol = 1e-10;
constexpr std::size_t kJacobiLimit = 512;

void check_square_symmetric(const Matrix& m) {
    const std::size_t n = m.rows();
    if (n == 0 || m.cols() != n) {
        throw ShapeError("sym_eigen: matrix must be square and non-empty");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::fabs(m(i, j) - m(j, i)) > kSymmetryTol) {
                throw ShapeError("sym_eigen: input not symmetric within 1e-10 at (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

Matrix symmetrized(const Matrix& m) {
    Matrix a = m;
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

// Order descending (stable in the original index for ties) and fix each
// eigenvector's sign so its largest-magnitude entry is positive. `vector_at(k, i)`
// returns entry i of the unsorted eigenvector k.
template <typename VectorAt>
EigenResult finalize_eigen(const std::vector<double>& diag, VectorAt&& vector_at) {
    const std::size_t n = diag.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return diag[i] > diag[j]; });

    EigenResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        res.eigenvalues[k] = diag[src];
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = vector_at(src, i);
            if (std::fabs(v) > best) {
                best = std::fabs(v);
                arg = i;
            }
        }
        const double sign = (vector_at(src, arg) < 0.0) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            res.eigenvectors(i, k) = sign * vector_at(src, i);
        }
    }
    return res;
}

// One Givens rotation in the (p, q) plane applied as J^T * A * J, plus the
// matching row rotation of the accumulated eigenvector rows.
inline void rotate(Matrix& a, Matrix& vt, std::size_t n, std::size_t p, std::size_t q,
                   double c, double s) {
    double* rp = a.row(p).data();
    double* rq = a.row(q).data();
    for (std::size_t j = 0; j < n; ++j) {
        const double g = rp[j];
        const double h = rq[j];
        rp[j] = c * g - s * h;
        rq[j] = s * g + c * h;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double* row = a.row(i).data();
        const double g = row[p];
        const double h = row[q];
        row[p] = c * g - s * h;
        row[q] = s * g + c * h;
    }
    double* vp = vt.row(p).data();
    double* vq = vt.row(q).data();
    for (std::size_t j = 0; j < n; ++j) {
        const double g = vp[j];
        const double h = vq[j];
        vp[j] = c * g - s * h;
        vq[j] = s * g + c * h;
    }
}

inline double pythag(double a, double b) {
    const double aa = std::fabs(a);
    const double ab = std::fabs(b);
    if (aa > ab) {
        const double r = ab / aa;
        return aa * std::sqrt(1.0 + r * r);
    }
    if (ab == 0.0) {
        return 0.0;
    }
    const double r = aa / ab;
    return ab * std::sqrt(1.0 + r * r);
}

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulation of the orthogonal transform in z (classic tred2 scheme).
void householder_tridiagonalize(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = z.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) {
                scale += std::fabs(z(i, k));
            }
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) {
                        g += z(j, k) * z(i, k);
                    }
                    for (std::size_t k = j + 1; k <= l; ++k) {
                        g += z(k, j) * z(i, k);
                    }
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = z(i, j);
                    g = e[j] - hh * f;
                    e[j] = g;
                    for (std::size_t k = 0; k <= j; ++k) {
                        z(j, k) -= f * e[k] + g * z(i, k);
                    }
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) {
                    g += z(i, k) * z(k, j);
                }
                for (std::size_t k = 0; k < i; ++k) {
                    z(k, j) -= g * z(k, i);
                }
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            z(j, i) = 0.0;
            z(i, j) = 0.0;
        }
    }
}

// Implicit-shift QL iteration on the tridiagonal (d, e), rotating the columns of
// z along. Eigenvalues land in d, eigenvector k in column k of z.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) {
                    break;
                }
            }
            if (m != l) {
                if (iter++ == 50) {
                    throw ConvergenceError("sym_eigen: QL iteration did not converge");
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = pythag(g, 1.0);
                const double sign_r = (g >= 0.0) ? std::fabs(r) : -std::fabs(r);
                g = d[m] - d[l] + e[l] / (g + sign_r);
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = pythag(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (underflow) {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

EigenResult sym_eigen_jacobi(const Matrix& m) {
    check_square_symmetric(m);
    const std::size_t n = m.rows();
    Matrix a = symmetrized(m);
    Matrix vt = Matrix::identity(n); // row i holds eigenvector i

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::fabs(a(p, q));
            }
        }
        if (off == 0.0) {
            converged = true;
            break;
        }
        const double thresh =
            (sweep < 3) ? 0.2 * off / static_cast<double>(n * n) : 0.0;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                const double g = 100.0 * std::fabs(apq);
                // Zero elements that can no longer change the diagonal.
                if (sweep > 3 && std::fabs(a(p, p)) + g == std::fabs(a(p, p)) &&
                    std::fabs(a(q, q)) + g == std::fabs(a(q, q))) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                if (std::fabs(apq) <= thresh) {
                    continue;
                }
                const double h = a(q, q) - a(p, p);
                double t;
                if (std::fabs(h) + g == std::fabs(h)) {
                    t = apq / h;
                } else {
                    const double theta = 0.5 * h / apq;
                    t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) {
                        t = -t;
                    }
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                rotate(a, vt, n, p, q, c, s);
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::fabs(a(p, q));
            }
        }
        if (off != 0.0) {
            throw ConvergenceError("sym_eigen: no convergence after " +
                                   std::to_string(kMaxSweeps) + " sweeps");
        }
    }

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = a(i, i);
    }
    return finalize_eigen(diag, [&](std::size_t k, std::size_t i) { return vt(k, i); });
}

EigenResult sym_eigen_tridiagonal(const Matrix& m) {
    check_square_symmetric(m);
    Matrix z = symmetrized(m);
    std::vector<double> d, e;
    householder_tridiagonalize(z, d, e);
    tridiagonal_ql(d, e, z);
    return finalize_eigen(d, [&](std::size_t k, std::size_t i) { return z(i, k); });
}

EigenResult sym_eigen(const Matrix& m) {
    if (m.rows() <= kJacobiLimit) {
        return sym_eigen_jacobi(m);
    }
    return sym_eigen_tridiagonal(m);
}

Tensor3 correlate2d(const Tensor3& image, const Tensor3& kernel, std::size_t stride,
                    std::size_t padding) {
    if (kernel.channels != image.channels) {
        throw ShapeError("correlate2d: kernel channels != image channels");
    }
    if (stride == 0) {
        throw ShapeError("correlate2d: stride must be positive");
    }
    const std::size_t padded_h = image.height + 2 * padding;
    const std::size_t padded_w = image.width + 2 * padding;
    if (kernel.height > padded_h || kernel.width > padded_w) {
        throw ShapeError("correlate2d: kernel larger than padded image");
    }
    const std::size_t out_h = (padded_h - kernel.height) / stride + 1;
    const std::size_t out_w = (padded_w - kernel.width) / stride + 1;

    Tensor3 out(out_h, out_w, 1);
    const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(padding);
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            double acc = 0.0;
            for (std::size_t ky = 0; ky < kernel.height; ++ky) {
                const std::ptrdiff_t iy =
                    static_cast<std::ptrdiff_t>(oy * stride + ky) - pad;
                if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(image.height)) {
                    continue;
                }
                for (std::size_t kx = 0; kx < kernel.width; ++kx) {
                    const std::ptrdiff_t ix =
                        static_cast<std::ptrdiff_t>(ox * stride + kx) - pad;
                    if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(image.width)) {
                        continue;
                    }
                    const double* ip = image.data.data() +
                                       flat_index(static_cast<std::size_t>(iy),
                                                  static_cast<std::size_t>(ix), 0,
                                                  image.width, image.channels);
                    const double* kp = kernel.data.data() +
                                       flat_index(ky, kx, 0, kernel.width, kernel.channels);
                    for (std::size_t c = 0; c < image.channels; ++c) {
                        acc += ip[c] * kp[c];
                    }
                }
            }
            out.at(oy, ox, 0) = acc;
        }
    }
    return out;
}

} // namespace spikewhite

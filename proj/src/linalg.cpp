#include "hopfdirac/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace hopfdirac {

std::size_t worker_count() {
    static const std::size_t cached = [] {
        if (const char* env = std::getenv("HOPF_DIRAC_THREADS")) {
            long v = std::atol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        }
        unsigned hc = std::thread::hardware_concurrency();
        return static_cast<std::size_t>(hc == 0 ? 1 : hc);
    }();
    return cached;
}

}  // namespace hopfdirac

namespace hopfdirac::lin {

std::vector<cplx> HermitianMatrix::dense() const {
    std::vector<cplx> a(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) a[i * n_ + j] = get(i, j);
    return a;
}

double HermitianMatrix::frobenius_norm() const {
    KahanSum s;
    for (std::size_t i = 0; i < n_; ++i) {
        s.add(std::norm(get(i, i)));
        for (std::size_t j = i + 1; j < n_; ++j) s.add(2.0 * std::norm(get(i, j)));
    }
    return std::sqrt(s.value());
}

namespace {

double hypot2(double a, double b) { return std::hypot(a, b); }

// Implicit-shift QL on a real symmetric tridiagonal (d, e); e[i] couples
// i and i+1, e[n-1] is scratch. If z != nullptr it is an n x n complex
// matrix (row-major) whose columns are rotated alongside.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::size_t n,
                 cplx* z) {
    if (n <= 1) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i - 1];
    e[n - 1] = 0.0;
    const int max_iter = 30;
    long total_budget = 30L * static_cast<long>(n);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= DBL_EPSILON * dd) break;
            }
            if (m != l) {
                if (iter++ == max_iter || --total_budget < 0)
                    throw NoConvergence("eigh: QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (std::size_t k = 0; k < n; ++k) {
                            cplx zk1 = z[k * n + i + 1];
                            cplx zk0 = z[k * n + i];
                            z[k * n + i + 1] = s * zk0 + c * zk1;
                            z[k * n + i] = c * zk0 - s * zk1;
                        }
                    }
                }
                if (r == 0.0 && m - l > 1) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void sort_pairs(std::vector<double>& w, std::vector<cplx>& z, std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    std::vector<double> ws(n);
    for (std::size_t i = 0; i < n; ++i) ws[i] = w[idx[i]];
    w = std::move(ws);
    if (!z.empty()) {
        std::vector<cplx> zs(n * n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) zs[i * n + j] = z[i * n + idx[j]];
        z = std::move(zs);
    }
}

}  // namespace

EigenDecomposition eigh(const HermitianMatrix& A, bool want_vectors) {
    const std::size_t n = A.order();
    if (n == 0) throw NumericError("eigh: empty matrix");
    std::vector<cplx> a = A.dense();
    std::vector<double> d(n), e(n, 0.0);
    std::vector<cplx> esub(n, 0.0);
    // reflectors stored per step for the back-transformation
    std::vector<std::vector<cplx>> vs;
    if (want_vectors) vs.resize(n >= 2 ? n - 2 : 0);

    // Householder reduction to Hermitian tridiagonal form
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        double sigma2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) sigma2 += std::norm(a[(k + 1 + i) * n + k]);
        double sigma = std::sqrt(sigma2);
        cplx x0 = a[(k + 1) * n + k];
        if (sigma == 0.0) {
            esub[k] = 0.0;
            continue;
        }
        cplx phase = (x0 == cplx(0.0)) ? cplx(1.0) : x0 / std::abs(x0);
        cplx alpha = -phase * sigma;
        std::vector<cplx> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = a[(k + 1 + i) * n + k];
        v[0] -= alpha;
        double vn2 = 0.0;
        for (auto& c : v) vn2 += std::norm(c);
        if (vn2 == 0.0) {
            esub[k] = alpha;
            continue;
        }
        double inv = 1.0 / std::sqrt(vn2);
        for (auto& c : v) c *= inv;

        // p = A22 v, K = v^H p, q = p - K v;  A22 <- A22 - 2 v q^H - 2 q v^H
        std::vector<cplx> p(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            cplx s = 0.0;
            const cplx* row = &a[(k + 1 + i) * n + (k + 1)];
            for (std::size_t j = 0; j < m; ++j) s += row[j] * v[j];
            p[i] = s;
        }
        cplx K = 0.0;
        for (std::size_t i = 0; i < m; ++i) K += std::conj(v[i]) * p[i];
        std::vector<cplx> q(m);
        for (std::size_t i = 0; i < m; ++i) q[i] = p[i] - K * v[i];
        for (std::size_t i = 0; i < m; ++i) {
            cplx* row = &a[(k + 1 + i) * n + (k + 1)];
            for (std::size_t j = 0; j < m; ++j)
                row[j] -= 2.0 * (v[i] * std::conj(q[j]) + q[i] * std::conj(v[j]));
        }
        esub[k] = alpha;
        a[(k + 1) * n + k] = alpha;
        if (want_vectors) vs[k] = std::move(v);
    }
    if (n >= 2) esub[n - 2] = a[(n - 1) * n + (n - 2)];
    for (std::size_t i = 0; i < n; ++i) d[i] = std::real(a[i * n + i]);

    // phase out the complex subdiagonal
    std::vector<cplx> t(n, cplx(1.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double mag = std::abs(esub[i]);
        e[i] = mag;
        t[i + 1] = (mag == 0.0) ? t[i] : esub[i] * t[i] / mag;
    }

    EigenDecomposition out;
    std::vector<cplx> z;
    if (want_vectors) {
        z.assign(n * n, cplx(0.0));
        for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
        // accumulate Q = H_0 H_1 ... applied from the left block-wise
        for (std::size_t k = (n >= 2 ? n - 2 : 0); k-- > 0;) {
            const auto& v = vs[k];
            if (v.empty()) continue;
            const std::size_t m = v.size();
            for (std::size_t col = 0; col < n; ++col) {
                cplx s = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    s += std::conj(v[i]) * z[(k + 1 + i) * n + col];
                s *= 2.0;
                for (std::size_t i = 0; i < m; ++i) z[(k + 1 + i) * n + col] -= v[i] * s;
            }
        }
        // column scaling by the phases: M = Q diag(t)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) z[i * n + j] *= t[j];
    }

    ql_implicit(d, e, n, want_vectors ? z.data() : nullptr);
    sort_pairs(d, z, n);

    out.eigenvalues = std::move(d);
    out.eigenvectors = std::move(z);
    out.residual_bound = 50.0 * DBL_EPSILON * static_cast<double>(n) * A.frobenius_norm();
    return out;
}

namespace {

// lower Cholesky factor of a Hermitian positive definite matrix (dense)
std::vector<cplx> cholesky(const HermitianMatrix& B) {
    const std::size_t n = B.order();
    std::vector<cplx> L(n * n, cplx(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            cplx s = B.get(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * std::conj(L[j * n + k]);
            if (i == j) {
                double dr = std::real(s);
                if (dr <= 0.0 || !std::isfinite(dr))
                    throw NotPositiveDefinite("eigh_generalized: B not positive definite");
                L[i * n + i] = std::sqrt(dr);
            } else {
                L[i * n + j] = s / L[j * n + j];
            }
        }
    }
    return L;
}

// forward solve L y = b in place
void forward_solve(const std::vector<cplx>& L, std::size_t n, cplx* b) {
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= L[i * n + k] * b[k];
        b[i] = s / L[i * n + i];
    }
}

// back solve L^H x = b in place
void backward_solve_herm(const std::vector<cplx>& L, std::size_t n, cplx* b) {
    for (std::size_t i = n; i-- > 0;) {
        cplx s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= std::conj(L[k * n + i]) * b[k];
        b[i] = s / std::conj(L[i * n + i]);
    }
}

}  // namespace

EigenDecomposition eigh_generalized(const HermitianMatrix& A, const HermitianMatrix& B,
                                    bool want_vectors) {
    const std::size_t n = A.order();
    if (B.order() != n) throw NumericError("eigh_generalized: size mismatch");
    std::vector<cplx> L = cholesky(B);

    // C = L^-1 A L^-H, formed column by column
    std::vector<cplx> W = A.dense();
    // W <- L^-1 A  (solve per column)
    std::vector<cplx> colbuf(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) colbuf[i] = W[i * n + j];
        forward_solve(L, n, colbuf.data());
        for (std::size_t i = 0; i < n; ++i) W[i * n + j] = colbuf[i];
    }
    // C = (L^-1 W^H)^H
    std::vector<cplx> Wh(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Wh[i * n + j] = std::conj(W[j * n + i]);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) colbuf[i] = Wh[i * n + j];
        forward_solve(L, n, colbuf.data());
        for (std::size_t i = 0; i < n; ++i) Wh[i * n + j] = colbuf[i];
    }
    HermitianMatrix C(n);
    // C = X^H with X = L^-1 W^H; symmetrize to kill rounding skew
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            cplx cij = 0.5 * (std::conj(Wh[j * n + i]) + Wh[i * n + j]);
            C.at(i, j) = (i == j) ? cplx(std::real(cij)) : cij;
        }

    EigenDecomposition dec = eigh(C, want_vectors);
    if (want_vectors) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) colbuf[i] = dec.eigenvectors[i * n + j];
            backward_solve_herm(L, n, colbuf.data());
            for (std::size_t i = 0; i < n; ++i) dec.eigenvectors[i * n + j] = colbuf[i];
        }
    }
    return dec;
}

std::vector<double> tridiag_eigenvalues(std::span<const double> diag,
                                        std::span<const cplx> off) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (off.size() + 1 != n) throw NumericError("tridiag_eigenvalues: size mismatch");
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::abs(off[i]);
    ql_implicit(d, e, n, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

std::pair<double, std::vector<cplx>> tridiag_eigenvector(std::span<const double> diag,
                                                         std::span<const cplx> off,
                                                         double shift, Rng& rng) {
    const std::size_t n = diag.size();
    if (off.size() + 1 != n) throw NumericError("tridiag_eigenvector: size mismatch");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag[i]));
    for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(off[i]));
    if (scale == 0.0) scale = 1.0;
    double eps_shift = 16.0 * DBL_EPSILON * scale;

    // LU with partial pivoting of (T - mu I); tridiagonal gains one extra
    // superdiagonal under row swaps.
    auto factor_solve = [&](double mu, std::vector<cplx>& x) {
        std::vector<cplx> lo(n, 0.0), di(n), up1(n, 0.0), up2(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) di[i] = diag[i] - mu;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            lo[i + 1] = std::conj(off[i]);  // row i+1, col i
            up1[i] = off[i];                // row i, col i+1
        }
        std::vector<int> swapped(n, 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(lo[i + 1]) > std::abs(di[i])) {
                std::swap(di[i], lo[i + 1]);
                std::swap(up1[i], di[i + 1]);
                if (i + 2 < n) std::swap(up2[i], up1[i + 1]);
                std::swap(x[i], x[i + 1]);
                swapped[i] = 1;
            }
            if (di[i] == cplx(0.0)) di[i] = eps_shift;
            cplx m = lo[i + 1] / di[i];
            di[i + 1] -= m * up1[i];
            if (i + 2 < n) up1[i + 1] -= m * up2[i];
            x[i + 1] -= m * x[i];
        }
        if (di[n - 1] == cplx(0.0)) di[n - 1] = eps_shift;
        for (std::size_t i = n; i-- > 0;) {
            cplx s = x[i];
            if (i + 1 < n) s -= up1[i] * x[i + 1];
            if (i + 2 < n) s -= up2[i] * x[i + 2];
            x[i] = s / di[i];
        }
    };

    auto rayleigh = [&](const std::vector<cplx>& x) {
        cplx num = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx tv = diag[i] * x[i];
            if (i > 0) tv += std::conj(off[i - 1]) * x[i - 1];
            if (i + 1 < n) tv += off[i] * x[i + 1];
            num += std::conj(x[i]) * tv;
        }
        return std::real(num);
    };
    std::vector<cplx> x(n);
    for (auto& c : x) c = cplx(rng.normal(), rng.normal());
    double mu = shift;
    for (int it = 0; it < 6; ++it) {
        factor_solve(mu, x);
        double nrm = 0.0;
        for (auto& c : x) nrm += std::norm(c);
        nrm = std::sqrt(nrm);
        for (auto& c : x) c /= nrm;
        if (it >= 1) mu = rayleigh(x);  // Rayleigh-quotient refinement
    }
    return {rayleigh(x), std::move(x)};
}

std::pair<double, double> simpson_log(std::span<const double> r,
                                      std::span<const double> f) {
    const std::size_t n = r.size();
    if (n < 3 || f.size() != n) throw NumericError("simpson_log: need >= 3 nodes");
    std::vector<double> t(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (r[i] <= 0.0) throw NumericError("simpson_log: nodes must be positive");
        t[i] = std::log(r[i]);
        g[i] = f[i] * r[i];  // dr = r dt
    }
    double h = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs((t[i + 1] - t[i]) - h) > 1e-8 * std::max(1.0, std::abs(h)))
            throw NumericError("simpson_log: grid not log-spaced");

    auto simpson_stride = [&](std::size_t stride) {
        const double hs = h * static_cast<double>(stride);
        std::size_t count = (n - 1) / stride;  // intervals at this stride
        KahanSum s;
        std::size_t i = 0;
        while (i + 2 * stride <= (count * stride)) {
            s.add(g[i] + 4.0 * g[i + stride] + g[i + 2 * stride]);
            i += 2 * stride;
        }
        double val = s.value() * hs / 3.0;
        // trapezoid correction for a leftover interval
        if (i < count * stride) val += 0.5 * hs * (g[i] + g[i + stride]);
        // and for nodes beyond count*stride (stride does not divide n-1)
        for (std::size_t j = count * stride; j + 1 < n; ++j)
            val += 0.5 * (t[j + 1] - t[j]) * (g[j] + g[j + 1]);
        return val;
    };
    double full = simpson_stride(1);
    double half = simpson_stride(2);
    return {full, std::abs(full - half) / 15.0};
}

void gauss_legendre(int npts, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
    x.resize(npts);
    w.resize(npts);
    const int m = (npts + 1) / 2;
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(pi * (i + 0.75) / (npts + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < npts; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = npts * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = xm - xl * z;
        x[npts - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[npts - 1 - i] = w[i];
    }
}

}  // namespace hopfdirac::lin

#include "hopfdirac/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hopfdirac/hopf_geometry.hpp"
#include "hopfdirac/linalg.hpp"

namespace hopfdirac::oracle {

MomentTable::MomentTable(int max_total_degree) : maxdeg_(max_total_degree) {
    for (int a = 0; a <= maxdeg_; ++a)
        for (int c = 0; a + c <= maxdeg_; ++c) {
            double v = 2.0 * pi * pi;
            // a! c! / (a+c+1)! accumulated without overflow
            for (int t = 1; t <= a + c + 1; ++t) v /= static_cast<double>(t);
            for (int t = 1; t <= a; ++t) v *= static_cast<double>(t);
            for (int t = 1; t <= c; ++t) v *= static_cast<double>(t);
            vals_[{a, c}] = v;
        }
}

double MomentTable::get(int a, int c) const {
    auto it = vals_.find({a, c});
    if (it == vals_.end()) throw DegreeTooLarge("MomentTable: degree out of range");
    return it->second;
}

namespace {

// monomial z1^a conj(z1)^b z2^c conj(z2)^d
struct Mono {
    int a, b, c, d;
    bool operator<(const Mono& o) const {
        return std::tie(a, b, c, d) < std::tie(o.a, o.b, o.c, o.d);
    }
};

struct Term {
    cplx coeff;
    Mono m;
};

// frame derivations as index shuffles (degree preserving on S^3 restrictions)
std::vector<Term> apply_frame(int which, const Mono& m) {
    std::vector<Term> out;
    auto add = [&](cplx coeff, int da, int db, int dc, int dd, int factor) {
        if (factor == 0) return;
        Mono r{m.a + da, m.b + db, m.c + dc, m.d + dd};
        if (r.a < 0 || r.b < 0 || r.c < 0 || r.d < 0) return;
        out.push_back({coeff * static_cast<double>(factor), r});
    };
    switch (which) {
        case 0:  // u1 = i zb2 d1 - i z2 db1 - i zb1 d2 + i z1 db2
            add(iunit, -1, 0, 0, +1, m.a);
            add(-iunit, 0, -1, +1, 0, m.b);
            add(-iunit, 0, +1, -1, 0, m.c);
            add(iunit, +1, 0, 0, -1, m.d);
            break;
        case 1:  // u2 = zb2 d1 + z2 db1 - zb1 d2 - z1 db2
            add(1.0, -1, 0, 0, +1, m.a);
            add(1.0, 0, -1, +1, 0, m.b);
            add(-1.0, 0, +1, -1, 0, m.c);
            add(-1.0, +1, 0, 0, -1, m.d);
            break;
        case 2:  // n = i z1 d1 - i zb1 db1 + i z2 d2 - i zb2 db2
            add(iunit, 0, 0, 0, 0, m.a - m.b + m.c - m.d);
            break;
    }
    return out;
}

// spin-connection matrices in the Hopf frame, read off the embedded
// covariant derivative rather than hard-coded
std::array<std::array<cplx, 4>, 3> connection_matrices() {
    using namespace geo;
    PointS3 p = PointS3::normalized(cplx(0.6, 0.1), cplx(0.55, -0.35));
    FrameVectors f = frame_at(p);
    FrameField ff[3] = {FrameField::U1, FrameField::U2, FrameField::N};
    std::array<std::array<cplx, 4>, 3> out;
    for (int x = 0; x < 3; ++x) {
        Tangent de2 = embedded_covariant_derivative(ff[x], FrameField::U2, p);
        Tangent de1 = embedded_covariant_derivative(ff[x], FrameField::U1, p);
        double A = dot(f.u1, de2);
        double B = dot(f.n, de2);
        double C = dot(f.n, de1);
        cplx ih = iunit * 0.5;
        out[x] = {ih * A, ih * (-B - iunit * C), ih * (-B + iunit * C), -ih * A};
    }
    return out;
}

}  // namespace

std::vector<OracleLine> s3_free_oracle(int degree) {
    if (degree < 0 || degree > 6) throw DegreeTooLarge("s3_free_oracle: degree must be in [0, 6]");
    MomentTable moments(2 * degree + 2);

    std::vector<Mono> basis;
    std::map<Mono, std::size_t> where;
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b)
            for (int c = 0; a + b + c <= degree; ++c)
                for (int d = 0; a + b + c + d <= degree; ++d) {
                    Mono m{a, b, c, d};
                    where[m] = basis.size();
                    basis.push_back(m);
                }
    const std::size_t nm = basis.size();
    const std::size_t dim = 2 * nm;
    auto idx = [&](int comp, std::size_t mono) { return comp * nm + mono; };

    auto moment = [&](const Mono& x, const Mono& y) -> double {
        // <x, y> over S^3; x enters conjugated
        if (x.a + y.b != y.a + x.b || x.c + y.d != y.c + x.d) return 0.0;
        return moments.get(x.a + y.b, x.c + y.d);
    };

    // Pauli matrices and the connection term -i sum sigma_j Gamma_j
    geo::PauliAlgebra pauli;
    auto gammas = connection_matrices();
    std::array<cplx, 4> cterm{};
    for (int j = 0; j < 3; ++j) {
        const auto& s = pauli.sigma[j];
        const auto& g = gammas[j];
        std::array<cplx, 4> prod = {s[0] * g[0] + s[1] * g[2], s[0] * g[1] + s[1] * g[3],
                                    s[2] * g[0] + s[3] * g[2], s[2] * g[1] + s[3] * g[3]};
        for (int t = 0; t < 4; ++t) cterm[t] += -iunit * prod[t];
    }

    // operator matrix and Gram
    lin::HermitianMatrix A(dim), B(dim);
    std::vector<std::vector<Term>> frame_action[3];
    for (int j = 0; j < 3; ++j) {
        frame_action[j].resize(nm);
        for (std::size_t m = 0; m < nm; ++m) frame_action[j][m] = apply_frame(j, basis[m]);
    }

    std::vector<cplx> dense_a(dim * dim, cplx(0.0));
    for (std::size_t m2 = 0; m2 < nm; ++m2) {
        for (int s2 = 0; s2 < 2; ++s2) {
            // image of basis element (s2, m2) under D
            // derivative part: -i sum_j sigma_j (u_j mono)
            for (int j = 0; j < 3; ++j) {
                for (const auto& t : frame_action[j][m2]) {
                    auto it = where.find(t.m);
                    if (it == where.end())
                        throw NumericError("s3_free_oracle: action left the basis");
                    for (int s1 = 0; s1 < 2; ++s1) {
                        cplx sig = pauli.sigma[j][s1 * 2 + s2];
                        if (sig == cplx(0.0)) continue;
                        cplx coeff = -iunit * sig * t.coeff;
                        // accumulate <(s1', m1)| coeff |(s1, t.m)> later via moments
                        for (std::size_t m1 = 0; m1 < nm; ++m1) {
                            double mm = moment(basis[m1], t.m);
                            if (mm != 0.0)
                                dense_a[idx(s1, m1) * dim + idx(s2, m2)] += coeff * mm;
                        }
                    }
                }
            }
            // constant connection term
            for (int s1 = 0; s1 < 2; ++s1) {
                cplx cme = cterm[s1 * 2 + s2];
                if (cme == cplx(0.0)) continue;
                for (std::size_t m1 = 0; m1 < nm; ++m1) {
                    double mm = moment(basis[m1], basis[m2]);
                    if (mm != 0.0) dense_a[idx(s1, m1) * dim + idx(s2, m2)] += cme * mm;
                }
            }
        }
    }
    double scale = 0.0, skew = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            scale = std::max(scale, std::abs(dense_a[i * dim + j]));
            skew = std::max(skew,
                            std::abs(dense_a[i * dim + j] - std::conj(dense_a[j * dim + i])));
        }
    if (skew > 1e-12 * std::max(1.0, scale))
        throw NumericError("s3_free_oracle: assembled operator not Hermitian");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            cplx v = 0.5 * (dense_a[i * dim + j] + std::conj(dense_a[j * dim + i]));
            A.at(i, j) = (i == j) ? cplx(std::real(v)) : v;
        }
    for (std::size_t i = 0; i < dim; ++i) {
        int s1 = i < nm ? 0 : 1;
        for (std::size_t j = i; j < dim; ++j) {
            int s2 = j < nm ? 0 : 1;
            if (s1 != s2) continue;
            B.at(i, j) = moment(basis[i % nm], basis[j % nm]);
        }
    }

    // canonical orthogonalization onto range(B), then a standard eigenproblem
    auto bdec = lin::eigh(B, true);
    double lmax = bdec.eigenvalues.back();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < dim; ++i)
        if (bdec.eigenvalues[i] > 1e-10 * lmax) keep.push_back(i);
    const std::size_t k = keep.size();
    std::vector<cplx> X(dim * k);
    for (std::size_t col = 0; col < k; ++col) {
        double s = 1.0 / std::sqrt(bdec.eigenvalues[keep[col]]);
        for (std::size_t r = 0; r < dim; ++r)
            X[r * k + col] = bdec.eigenvectors[r * dim + keep[col]] * s;
    }
    // At = X^H A X
    std::vector<cplx> AX(dim * k, cplx(0.0));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            cplx a = A.get(r, c);
            if (a == cplx(0.0)) continue;
            for (std::size_t col = 0; col < k; ++col) AX[r * k + col] += a * X[c * k + col];
        }
    lin::HermitianMatrix At(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            cplx s = 0.0;
            for (std::size_t r = 0; r < dim; ++r) s += std::conj(X[r * k + i]) * AX[r * k + j];
            At.at(i, j) = (i == j) ? cplx(std::real(s)) : s;
        }
    auto adec = lin::eigh(At, false);

    std::vector<OracleLine> lines;
    for (double v : adec.eigenvalues) {
        if (!lines.empty() && std::abs(v - lines.back().value) < 1e-9 * std::max(1.0, std::abs(v)))
            ++lines.back().multiplicity;
        else
            lines.push_back({v, 1});
    }
    return lines;
}

// ---- constant-field 2-D oracle -------------------------------------------

namespace {

struct SectorForms {
    std::vector<double> ritz_g;  // eigenvalues of L-^* L- on the G trials
    std::vector<double> ritz_f;
};

SectorForms sector_forms(long n, long j, int basis_size) {
    if (basis_size < 2) throw ValidationError("s2 oracle: basis_size too small");
    // quadrature in x = log tan(theta/2)
    const double L = 26.0;
    const int segs = 160, per = 10;
    std::vector<double> xs, ws, gx, gw;
    for (int s = 0; s < segs; ++s) {
        double a = -L + 2.0 * L * s / segs, b = -L + 2.0 * L * (s + 1) / segs;
        lin::gauss_legendre(per, a, b, gx, gw);
        xs.insert(xs.end(), gx.begin(), gx.end());
        ws.insert(ws.end(), gw.begin(), gw.end());
    }
    const std::size_t nq = xs.size();

    // trial ladders: pole-adapted weight times polynomials in u = -cos(theta);
    // this spans the z^a zbar^b (1+|z|^2/4)^{-s} family of fixed angular
    // index. The polynomial ladder is orthogonalized against the actual
    // weighted measure (Stieltjes three-term recurrence) to keep the Gram
    // well conditioned.
    auto build = [&](long ang_index, long south_index, bool lowering) {
        // flat-gauge functions decay one conformal power faster than the
        // section, hence the +1 in the weight exponent
        double pN = std::abs(static_cast<double>(ang_index));
        double pS = std::abs(static_cast<double>(south_index));
        double s0 = 0.5 * (pN + pS + 1.0);

        std::vector<double> uq(nq), mu(nq), wq(nq), dwq(nq), sthq(nq), kapq(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            double x = xs[q];
            double tn = std::exp(x);  // tan(theta/2)
            double r = 2.0 * tn;
            double sth = 2.0 * tn / (1.0 + tn * tn);
            double base = 1.0 + 0.25 * r * r;
            uq[q] = (tn * tn - 1.0) / (tn * tn + 1.0);  // -cos(theta)
            sthq[q] = sth;
            kapq[q] = static_cast<double>(n) * tn;
            double w = std::exp(pN * std::log(r) - s0 * std::log(base));
            wq[q] = w;
            dwq[q] = (pN * base / r - 0.5 * s0 * r) * w;
            // measure tan(theta/2) dtheta in the x variable
            mu[q] = ws[q] * tn * sth;
        }
        // orthonormal polynomials p_i(u) w.r.t. the measure w^2 mu du via the
        // normalized Stieltjes recurrence; derivatives propagate alongside
        std::vector<std::vector<double>> P(basis_size, std::vector<double>(nq));
        std::vector<std::vector<double>> dP(basis_size, std::vector<double>(nq, 0.0));
        auto wdot = [&](const std::vector<double>& a, const std::vector<double>& b) {
            KahanSum s;
            for (std::size_t q = 0; q < nq; ++q) s.add(mu[q] * wq[q] * wq[q] * a[q] * b[q]);
            return s.value();
        };
        {
            std::vector<double> one(nq, 1.0);
            double inv = 1.0 / std::sqrt(wdot(one, one));
            for (std::size_t q = 0; q < nq; ++q) P[0][q] = inv;
        }
        double beta = 0.0;
        for (int i = 0; i + 1 < basis_size; ++i) {
            std::vector<double> up(nq);
            for (std::size_t q = 0; q < nq; ++q) up[q] = uq[q] * P[i][q];
            double alpha = wdot(up, P[i]);
            std::vector<double> next(nq), dnext(nq);
            for (std::size_t q = 0; q < nq; ++q) {
                double pm = (i > 0) ? P[i - 1][q] : 0.0;
                double dpm = (i > 0) ? dP[i - 1][q] : 0.0;
                next[q] = (uq[q] - alpha) * P[i][q] - beta * pm;
                dnext[q] = P[i][q] + (uq[q] - alpha) * dP[i][q] - beta * dpm;
            }
            double nrm2 = wdot(next, next);
            if (!(nrm2 > 1e-300))
                throw IllConditionedGram("s2 oracle: trial ladder degenerated");
            beta = std::sqrt(nrm2);
            for (std::size_t q = 0; q < nq; ++q) {
                P[i + 1][q] = next[q] / beta;
                dP[i + 1][q] = dnext[q] / beta;
            }
        }

        lin::HermitianMatrix G(basis_size), Q(basis_size);
        std::vector<std::vector<double>> tcols(basis_size, std::vector<double>(nq));
        std::vector<std::vector<double>> lcols(basis_size, std::vector<double>(nq));
        for (int i = 0; i < basis_size; ++i)
            for (std::size_t q = 0; q < nq; ++q) {
                double t = wq[q] * P[i][q];
                double dt = dwq[q] * P[i][q] + wq[q] * dP[i][q] * sthq[q];
                double ell;
                if (lowering) {
                    ell = 2.0 * dt + (2.0 * static_cast<double>(ang_index) / sthq[q]) * t -
                          kapq[q] * t;
                } else {
                    ell = 2.0 * dt - (2.0 * static_cast<double>(ang_index) / sthq[q]) * t +
                          kapq[q] * t;
                }
                tcols[i][q] = t;
                lcols[i][q] = ell;
            }
        for (int i = 0; i < basis_size; ++i)
            for (int k = i; k < basis_size; ++k) {
                KahanSum g2, q2;
                for (std::size_t q = 0; q < nq; ++q) {
                    g2.add(mu[q] * tcols[i][q] * tcols[k][q]);
                    q2.add(mu[q] * lcols[i][q] * lcols[k][q]);
                }
                G.at(i, k) = g2.value();
                Q.at(i, k) = q2.value();
            }
        auto gdec = lin::eigh(G, false);
        double gmax = gdec.eigenvalues.back();
        if (gdec.eigenvalues.front() <= 0.0 || gmax / gdec.eigenvalues.front() > 1e12)
            throw IllConditionedGram("s2 oracle: Gram condition number exceeds 1e12");
        auto dec = lin::eigh_generalized(Q, G, false);
        return dec.eigenvalues;
    };

    SectorForms out;
    // G component: angular index j+1, south index j-n
    out.ritz_g = build(j + 1, j - n, true);
    // F component: angular index j, south index j-n+1
    out.ritz_f = build(j, j - n + 1, false);
    return out;
}

}  // namespace

std::vector<double> s2_sector_oracle(long n, long j, int basis_size) {
    auto forms = sector_forms(n, j, basis_size);
    std::vector<double> pos;
    for (double v : forms.ritz_g)
        if (v > 1e-8) pos.push_back(std::sqrt(v));
    std::sort(pos.begin(), pos.end());
    return pos;
}

S2ConstantOracle s2_constant_field_oracle(long n, int basis_size, double lambda_max) {
    if (std::labs(n) > 4) throw ValidationError("s2_constant_field_oracle: |n| <= 4 required");
    S2ConstantOracle out;
    out.zero_ritz = 0.0;
    long jspan = static_cast<long>(std::ceil(0.5 * lambda_max)) + std::labs(n) + 4;
    for (long j = -jspan; j <= jspan; ++j) {
        auto forms = sector_forms(n, j, basis_size);
        std::vector<double> pos;
        for (double v : forms.ritz_g)
            if (v > 1e-6) {
                double lam = std::sqrt(v);
                if (lam <= lambda_max) pos.push_back(lam);
            }
        std::sort(pos.begin(), pos.end());
        if (!pos.empty()) out.per_sector[j] = pos;
        out.positive.insert(out.positive.end(), pos.begin(), pos.end());
        // kernel side: upper for n > 0 (sectors 0..n-1), lower for n < 0
        bool mode_sector = (n > 0 && j >= 0 && j < n) || (n < 0 && j >= n && j < 0);
        if (mode_sector) {
            const auto& side = (n > 0) ? forms.ritz_f : forms.ritz_g;
            double mn = side.empty() ? 1e300 : side.front();
            out.zero_ritz = std::max(out.zero_ritz, mn);
            ++out.zero_sectors;
        }
    }
    std::sort(out.positive.begin(), out.positive.end());
    return out;
}

}  // namespace hopfdirac::oracle

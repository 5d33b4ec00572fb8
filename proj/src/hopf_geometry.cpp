#include "hopfdirac/hopf_geometry.hpp"

#include <cmath>

namespace hopfdirac::geo {

PointS3 PointS3::normalized(cplx a, cplx b) {
    double r = std::sqrt(std::norm(a) + std::norm(b));
    if (r == 0.0) throw NumericError("PointS3: zero vector");
    return PointS3(a / r, b / r);
}

double PointS3::norm_defect() const {
    return std::abs(std::norm(z1) + std::norm(z2) - 1.0);
}

PauliAlgebra::PauliAlgebra() {
    sigma[0] = {cplx(0), cplx(1), cplx(1), cplx(0)};
    sigma[1] = {cplx(0), -iunit, iunit, cplx(0)};
    sigma[2] = {cplx(1), cplx(0), cplx(0), cplx(-1)};
}

namespace {
using Mat2 = std::array<cplx, 4>;
Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
double max_abs(const Mat2& a) {
    double m = 0.0;
    for (auto& c : a) m = std::max(m, std::abs(c));
    return m;
}
}  // namespace

double PauliAlgebra::identity_residual() const {
    double res = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Mat2 ac = mul(sigma[i], sigma[j]);
            Mat2 ca = mul(sigma[j], sigma[i]);
            double delta = (i == j) ? 2.0 : 0.0;
            Mat2 r = {ac[0] + ca[0] - delta, ac[1] + ca[1], ac[2] + ca[2],
                      ac[3] + ca[3] - delta};
            res = std::max(res, max_abs(r));
        }
    // positive orientation: i s1 s2 s3 = -I
    Mat2 p = mul(sigma[0], mul(sigma[1], sigma[2]));
    Mat2 r = {iunit * p[0] + 1.0, iunit * p[1], iunit * p[2], iunit * p[3] + 1.0};
    return std::max(res, max_abs(r));
}

std::optional<cplx> hopf_project(const PointS3& p) {
    if (p.z2 == cplx(0.0)) return std::nullopt;
    return 2.0 * p.z1 / p.z2;
}

Tangent frame_field(FrameField which, cplx z1, cplx z2) {
    switch (which) {
        case FrameField::U1:
            return {iunit * std::conj(z2), -iunit * std::conj(z1)};
        case FrameField::U2:
            return {std::conj(z2), -std::conj(z1)};
        case FrameField::N:
            return {iunit * z1, iunit * z2};
    }
    return {};
}

FrameVectors frame_at(const PointS3& p) {
    FrameVectors f;
    f.u1 = frame_field(FrameField::U1, p.z1, p.z2);
    f.u2 = frame_field(FrameField::U2, p.z1, p.z2);
    f.n = frame_field(FrameField::N, p.z1, p.z2);
    f.v = {p.z1, p.z2};
    return f;
}

Tangent embedded_covariant_derivative(FrameField X, FrameField Y, const PointS3& p) {
    Tangent xv = frame_field(X, p.z1, p.z2);
    // the fields are (anti)linear in the embedding coordinates, so the ambient
    // directional derivative is the field map applied to the direction
    Tangent dy = frame_field(Y, xv[0], xv[1]);
    Tangent v = {p.z1, p.z2};
    double c = dot(v, dy);
    return {dy[0] - c * v[0], dy[1] - c * v[1]};
}

Tangent frame_bracket(FrameField X, FrameField Y, const PointS3& p) {
    Tangent a = embedded_covariant_derivative(X, Y, p);
    Tangent b = embedded_covariant_derivative(Y, X, p);
    return {a[0] - b[0], a[1] - b[1]};
}

double verify_dnu_identity(const std::vector<PointS3>& sample) {
    if (sample.empty()) throw NumericError("verify_dnu_identity: empty sample");
    double worst = 0.0;
    for (const auto& p : sample) {
        FrameVectors f = frame_at(p);
        Tangent d1 = embedded_covariant_derivative(FrameField::U1, FrameField::N, p);
        Tangent d2 = embedded_covariant_derivative(FrameField::U2, FrameField::N, p);
        Tangent dn = embedded_covariant_derivative(FrameField::N, FrameField::N, p);
        double nu_star = dot(d1, f.u2) - dot(d2, f.u1);
        worst = std::max(worst, std::abs(nu_star + 2.0));
        // (u1,*dnu) = dnu(u2,n), (u2,*dnu) = -dnu(u1,n)
        worst = std::max(worst, std::abs(dot(d2, f.n) - dot(dn, f.u2)));
        worst = std::max(worst, std::abs(-dot(d1, f.n) + dot(dn, f.u1)));
    }
    return worst;
}

namespace {

// frame coefficients of a tangent vector
std::array<double, 3> frame_coeffs(const Tangent& t, const FrameVectors& f) {
    return {dot(f.u1, t), dot(f.u2, t), dot(f.n, t)};
}

FrameField fields[3] = {FrameField::U1, FrameField::U2, FrameField::N};

}  // namespace

Tangent riemann_curvature(FrameField X, FrameField Y, FrameField Z, const PointS3& p) {
    FrameVectors f = frame_at(p);
    // nabla_Y Z and nabla_X Z have constant frame coefficients; differentiate
    // them by expanding in the frame and applying the connection again.
    auto second = [&](FrameField A, FrameField B) {
        Tangent first = embedded_covariant_derivative(B, Z, p);
        auto c = frame_coeffs(first, f);
        Tangent out = {0.0, 0.0};
        for (int a = 0; a < 3; ++a) {
            Tangent da = embedded_covariant_derivative(A, fields[a], p);
            out[0] += c[a] * da[0];
            out[1] += c[a] * da[1];
        }
        return out;
    };
    Tangent xyz = second(X, Y);
    Tangent yxz = second(Y, X);
    Tangent br = frame_bracket(X, Y, p);
    auto cb = frame_coeffs(br, f);
    Tangent nbr = {0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        Tangent da = embedded_covariant_derivative(fields[a], Z, p);
        nbr[0] += cb[a] * da[0];
        nbr[1] += cb[a] * da[1];
    }
    return {xyz[0] - yxz[0] - nbr[0], xyz[1] - yxz[1] - nbr[1]};
}

RiemannTable riemann_curvature_table(const PointS3& p) {
    RiemannTable t;
    t.r_131 = riemann_curvature(FrameField::U1, FrameField::N, FrameField::U1, p);
    t.r_132 = riemann_curvature(FrameField::U1, FrameField::N, FrameField::U2, p);
    t.r_133 = riemann_curvature(FrameField::U1, FrameField::N, FrameField::N, p);
    t.r_231 = riemann_curvature(FrameField::U2, FrameField::N, FrameField::U1, p);
    t.r_232 = riemann_curvature(FrameField::U2, FrameField::N, FrameField::U2, p);
    t.r_233 = riemann_curvature(FrameField::U2, FrameField::N, FrameField::N, p);
    return t;
}

cplx hopf_pushforward(const PointS3& p, const Tangent& t) {
    if (p.z2 == cplx(0.0)) throw NumericError("hopf_pushforward: pole z2 = 0");
    return 2.0 * (t[0] * p.z2 - p.z1 * t[1]) / (p.z2 * p.z2);
}

Tangent horizontal_lift(const PointS3& p, cplx w_tangent) {
    if (p.z2 == cplx(0.0)) throw NumericError("horizontal_lift: pole z2 = 0");
    // d phi(a u1 + b u2) = (a i + b) 2 / z2^2
    cplx coef = w_tangent * p.z2 * p.z2 * 0.5;
    double a = std::imag(coef), b = std::real(coef);
    Tangent u1 = frame_field(FrameField::U1, p.z1, p.z2);
    Tangent u2 = frame_field(FrameField::U2, p.z1, p.z2);
    return {a * u1[0] + b * u2[0], a * u1[1] + b * u2[1]};
}

PointS3 frame_flow(FrameField X, const PointS3& p, double t) {
    Tangent m = frame_field(X, p.z1, p.z2);
    double c = std::cos(t), s = std::sin(t);
    return PointS3(c * p.z1 + s * m[0], c * p.z2 + s * m[1]);
}

std::vector<PointS3> sample_points(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PointS3> pts;
    pts.reserve(count);
    while (pts.size() < count) {
        cplx a(rng.normal(), rng.normal());
        cplx b(rng.normal(), rng.normal());
        double r = std::sqrt(std::norm(a) + std::norm(b));
        if (r < 1e-6) continue;
        pts.emplace_back(a / r, b / r);
    }
    return pts;
}

}  // namespace hopfdirac::geo

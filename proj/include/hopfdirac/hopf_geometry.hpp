#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hopfdirac/common.hpp"

namespace hopfdirac::geo {

// Point of S^3 = { (z1,z2) in C^2 : |z1|^2 + |z2|^2 = 1 }.
struct PointS3 {
    cplx z1, z2;

    PointS3() : z1(1.0), z2(0.0) {}
    PointS3(cplx a, cplx b) : z1(a), z2(b) {}
    static PointS3 normalized(cplx a, cplx b);
    double norm_defect() const;  // | |z1|^2+|z2|^2 - 1 |
};

// Tangent vector of S^3 in embedding coordinates, as a complex pair.
using Tangent = std::array<cplx, 2>;

inline double dot(const Tangent& a, const Tangent& b) {
    return std::real(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
}
inline double norm(const Tangent& a) { return std::sqrt(dot(a, a)); }

// Orthonormal frame u1 = (i conj(z2), -i conj(z1)), u2 = (conj(z2), -conj(z1)),
// n = (i z1, i z2); v = (z1, z2) is the outward normal.
struct FrameVectors {
    Tangent u1, u2, n;
    Tangent v;
};

enum class FrameField { U1, U2, N };

struct PauliAlgebra {
    std::array<std::array<cplx, 4>, 3> sigma;  // row-major 2x2 each
    PauliAlgebra();
    // max residual of {s_i, s_j} = 2 delta_ij and i s1 s2 s3 = -I
    double identity_residual() const;
};

// Hopf map phi(z1, z2) = 2 z1 / z2; nullopt marks the point at infinity.
std::optional<cplx> hopf_project(const PointS3& p);

FrameVectors frame_at(const PointS3& p);

// Frame-field value at an arbitrary C^2 point (the fields are linear in the
// embedding coordinates).
Tangent frame_field(FrameField which, cplx z1, cplx z2);

// Levi-Civita covariant derivative nabla_X Y at p for frame fields X, Y,
// computed from the closed-form linearity of the fields (no numerical
// differentiation).
Tangent embedded_covariant_derivative(FrameField X, FrameField Y, const PointS3& p);

// Commutator [X, Y] as a tangent vector (torsion-free identity).
Tangent frame_bracket(FrameField X, FrameField Y, const PointS3& p);

// max over samples of |dnu(u1,u2) + 2| together with |(u1,*dnu)|, |(u2,*dnu)|
double verify_dnu_identity(const std::vector<PointS3>& sample);

// R(X,Y)Z for frame fields, via exact second covariant derivatives.
Tangent riemann_curvature(FrameField X, FrameField Y, FrameField Z, const PointS3& p);

struct RiemannTable {
    // entries R(u_a, n) u_b for a, b in {1,2} plus R(u_a, n) n
    Tangent r_131, r_132, r_133;  // R(u1,u3)u1, R(u1,u3)u2, R(u1,u3)u3
    Tangent r_231, r_232, r_233;
};
RiemannTable riemann_curvature_table(const PointS3& p);

// d phi at p applied to a tangent vector (phi is holomorphic in (z1,z2)).
cplx hopf_pushforward(const PointS3& p, const Tangent& t);

// Horizontal lift of a chart tangent W at w = phi(p): the unique combination
// of u1, u2 pushing forward to W. Requires z2 != 0.
Tangent horizontal_lift(const PointS3& p, cplx w_tangent);

// Exact flow of a frame field: all three fields satisfy M^2 = -I as real
// linear maps, so exp(t M) = cos(t) I + sin(t) M.
PointS3 frame_flow(FrameField X, const PointS3& p, double t);

std::vector<PointS3> sample_points(std::size_t count, std::uint64_t seed);

}  // namespace hopfdirac::geo

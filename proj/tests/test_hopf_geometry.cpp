#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hopfdirac/hopf_geometry.hpp"

using namespace hopfdirac;
using namespace hopfdirac::geo;

namespace {
constexpr std::uint64_t kSeed = 0x48504653ull;  // recorded verification seed

double tangent_dist(const Tangent& a, const Tangent& b) {
    return std::sqrt(std::norm(a[0] - b[0]) + std::norm(a[1] - b[1]));
}
}  // namespace

TEST_CASE("hopf_project") {
    CHECK(!hopf_project(PointS3(1.0, 0.0)).has_value());  // pole z2 = 0
    auto at0 = hopf_project(PointS3(0.0, 1.0));
    REQUIRE(at0.has_value());
    CHECK(std::abs(*at0) == 0.0);
    double s = 1.0 / std::sqrt(2.0);
    auto v = hopf_project(PointS3(s, s));
    REQUIRE(v.has_value());
    CHECK(std::abs(*v - cplx(2.0, 0.0)) <= 1e-14);
}

TEST_CASE("frame at (1,0) and orthonormality") {
    FrameVectors f = frame_at(PointS3(1.0, 0.0));
    CHECK(tangent_dist(f.u1, Tangent{cplx(0.0), -iunit}) == 0.0);
    CHECK(tangent_dist(f.u2, Tangent{cplx(0.0), cplx(-1.0)}) == 0.0);
    CHECK(tangent_dist(f.n, Tangent{iunit, cplx(0.0)}) == 0.0);

    double s = 1.0 / std::sqrt(2.0);
    FrameVectors g = frame_at(PointS3(s, s));
    const Tangent* vecs[3] = {&g.u1, &g.u2, &g.n};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double expect = i == j ? 1.0 : 0.0;
            CHECK(std::abs(dot(*vecs[i], *vecs[j]) - expect) <= 1e-15);
        }
        CHECK(std::abs(dot(*vecs[i], g.v)) <= 1e-15);
    }
}

TEST_CASE("covariant derivative table of the Hopf frame") {
    auto pts = sample_points(32, kSeed);
    pts.emplace_back(1.0, 0.0);
    for (const auto& p : pts) {
        FrameVectors f = frame_at(p);
        struct Row {
            FrameField x, y;
            Tangent expect;
        };
        Tangent zero{cplx(0.0), cplx(0.0)};
        Tangent mu1{-f.u1[0], -f.u1[1]}, mu2{-f.u2[0], -f.u2[1]}, mn{-f.n[0], -f.n[1]};
        Row rows[] = {
            {FrameField::N, FrameField::U1, f.u2},  // nabla_n u1 = u2
            {FrameField::N, FrameField::U2, mu1},   // nabla_n u2 = -u1
            {FrameField::U1, FrameField::N, mu2},   // nabla_u1 n = -u2
            {FrameField::U2, FrameField::N, f.u1},  // nabla_u2 n = u1
            {FrameField::U1, FrameField::U2, f.n},  // nabla_u1 u2 = n
            {FrameField::U2, FrameField::U1, mn},   // nabla_u2 u1 = -n
            {FrameField::N, FrameField::N, zero},   // nabla_n n = 0
        };
        for (const auto& r : rows) {
            Tangent got = embedded_covariant_derivative(r.x, r.y, p);
            CHECK(tangent_dist(got, r.expect) <= 1e-13);
        }
    }
}

TEST_CASE("dnu = -2 * nu on 1000 seeded points") {
    auto pts = sample_points(1000, kSeed);
    CHECK(verify_dnu_identity(pts) <= 1e-13);
    // closed-form substitution at (1,0), and determinism on a repeated point
    std::vector<PointS3> one = {PointS3(1.0, 0.0)};
    double r1 = verify_dnu_identity(one);
    CHECK(r1 <= 1e-15);
    std::vector<PointS3> rep = {PointS3(1.0, 0.0), PointS3(1.0, 0.0)};
    CHECK(verify_dnu_identity(rep) == r1);
}

TEST_CASE("Riemann curvature table") {
    auto pts = sample_points(8, kSeed + 1);
    pts.emplace_back(1.0, 0.0);
    for (const auto& p : pts) {
        FrameVectors f = frame_at(p);
        RiemannTable t = riemann_curvature_table(p);
        Tangent mu3{-f.n[0], -f.n[1]};
        CHECK(tangent_dist(t.r_131, mu3) <= 1e-13);  // R(u1,u3)u1 = -u3
        CHECK(tangent_dist(t.r_132, Tangent{cplx(0.0), cplx(0.0)}) <= 1e-13);
        CHECK(tangent_dist(t.r_133, f.u1) <= 1e-13);  // R(u1,u3)u3 = u1
        CHECK(tangent_dist(t.r_231, Tangent{cplx(0.0), cplx(0.0)}) <= 1e-13);
        CHECK(tangent_dist(t.r_232, mu3) <= 1e-13);
        CHECK(tangent_dist(t.r_233, f.u2) <= 1e-13);
    }
}

TEST_CASE("pushforward of u1 is 2i / z2^2") {
    auto pts = sample_points(400, kSeed + 2);
    const double step = 1e-5;
    for (const auto& p : pts) {
        if (std::abs(p.z2) < 0.15) continue;  // finite differences degenerate at the pole
        FrameVectors f = frame_at(p);
        cplx closed = hopf_pushforward(p, f.u1);
        cplx expect = 2.0 * iunit / (p.z2 * p.z2);
        CHECK(std::abs(closed - expect) <= 1e-13 * std::abs(expect));
        // independent finite-difference pushforward along the exact u1 flow
        auto phi_at = [&](double t) {
            auto w = hopf_project(frame_flow(FrameField::U1, p, t));
            REQUIRE(w.has_value());
            return *w;
        };
        cplx fd = (8.0 * (phi_at(step) - phi_at(-step)) -
                   (phi_at(2.0 * step) - phi_at(-2.0 * step))) /
                  (12.0 * step);
        CHECK(std::abs(fd - closed) <= 1e-10 * std::max(1.0, std::abs(closed)));
    }
}

namespace {

// RK4 flow of the horizontal-lift field of a fixed chart direction
PointS3 lift_flow(const PointS3& p0, cplx w_dir, double t, int steps = 4) {
    PointS3 p = p0;
    double h = t / steps;
    auto field = [&](const PointS3& q) { return horizontal_lift(q, w_dir); };
    for (int s = 0; s < steps; ++s) {
        auto k1 = field(p);
        auto adv = [&](const Tangent& k, double f) {
            return PointS3::normalized(p.z1 + f * h * k[0], p.z2 + f * h * k[1]);
        };
        auto k2 = field(adv(k1, 0.5));
        auto k3 = field(adv(k2, 0.5));
        auto k4 = field(adv(k3, 1.0));
        p = PointS3::normalized(
            p.z1 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            p.z2 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]));
    }
    return p;
}

}  // namespace

TEST_CASE("phi kills the bracket of n with horizontal lifts") {
    // the u-frame itself rotates along fibers; the bracket identity holds
    // for horizontal lifts of a fixed frame on N
    auto pts = sample_points(64, kSeed + 3);
    for (const auto& p : pts) {
        if (std::abs(p.z2) < 0.25) continue;
        for (cplx w_dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
            // exact-route check: [n, lift] from a high-order derivative of the
            // closed-form lift field along the exact n flow
            const double fe = 1e-4;
            auto lift_at = [&](double t) {
                PointS3 q = frame_flow(FrameField::N, p, t);
                return horizontal_lift(q, w_dir);
            };
            Tangent lm2 = lift_at(-2 * fe), lm1 = lift_at(-fe), lp1 = lift_at(fe),
                    lp2 = lift_at(2 * fe);
            Tangent d_n_lift;
            for (int c = 0; c < 2; ++c)
                d_n_lift[c] = (8.0 * (lp1[c] - lm1[c]) - (lp2[c] - lm2[c])) / (12.0 * fe);
            Tangent lift = horizontal_lift(p, w_dir);
            Tangent d_lift_n = frame_field(FrameField::N, lift[0], lift[1]);
            Tangent bracket{d_n_lift[0] - d_lift_n[0], d_n_lift[1] - d_lift_n[1]};
            CHECK(std::abs(hopf_pushforward(p, bracket)) <= 1e-9);

            // finite differences of hopf_project along flows
            const double e = 1e-3;
            auto comm = [&](double s, double t) {
                PointS3 a = lift_flow(frame_flow(FrameField::N, p, s), w_dir, t);
                PointS3 b = frame_flow(FrameField::N, lift_flow(p, w_dir, t), s);
                auto wa = hopf_project(a), wb = hopf_project(b);
                REQUIRE(wa.has_value());
                REQUIRE(wb.has_value());
                return *wa - *wb;
            };
            cplx fd = (comm(e, e) - comm(-e, e) - comm(e, -e) + comm(-e, -e)) / (4.0 * e * e);
            CHECK(std::abs(fd) <= 1e-6);
        }
    }
}

TEST_CASE("Pauli anticommutation and orientation are exact") {
    PauliAlgebra pauli;
    CHECK(pauli.identity_residual() == 0.0);
}

TEST_CASE("frame flows stay on the sphere") {
    auto pts = sample_points(16, kSeed + 4);
    for (const auto& p : pts)
        for (FrameField x : {FrameField::U1, FrameField::U2, FrameField::N})
            CHECK(frame_flow(x, p, 0.37).norm_defect() <= 1e-14);
}

TEST_CASE("frame orthonormality on 1000 seeded points") {
    auto pts = sample_points(1000, kSeed + 5);
    double worst = 0.0;
    for (const auto& p : pts) {
        FrameVectors f = frame_at(p);
        const Tangent* v[3] = {&f.u1, &f.u2, &f.n};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
                worst = std::max(worst, std::abs(dot(*v[i], *v[j]) - (i == j ? 1.0 : 0.0)));
            worst = std::max(worst, std::abs(dot(*v[i], f.v)));
        }
    }
    CHECK(worst <= 1e-13);
}

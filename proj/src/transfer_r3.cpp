#include "hopfdirac/transfer_r3.hpp"

#include <algorithm>
#include <cmath>

#include "hopfdirac/linalg.hpp"

namespace hopfdirac::r3 {

namespace {

// quaternion as a complex pair (alpha, beta) <-> alpha + beta j
struct Quat {
    cplx a, b;
    Quat operator*(const Quat& o) const {
        return {a * o.a - b * std::conj(o.b), a * o.b + b * std::conj(o.a)};
    }
};

// third axis reflected: X = x1 i + x2 j - x3 k, so the pushed frame carries
// the Hopf-frame orientation class
Quat embed(const Vec3& x) { return {cplx(0.0, x[0]), cplx(x[1], -x[2])}; }

const Quat kUnits[3] = {{cplx(0, 1), cplx(0, 0)},
                        {cplx(0, 0), cplx(1, 0)},
                        {cplx(0, 0), cplx(0, -1)}};  // i, j, -k

Quat half_point(const Vec3& x) {
    double s = std::sqrt(1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    Quat X = embed(x);
    return {(1.0 + X.a) / s, X.b / s};
}

Mat2 matmul(const Mat2& m, const Mat2& n) {
    return {m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3]};
}

Spinor matvec(const Mat2& m, const Spinor& v) {
    return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

// d tau / d x_m as a C^2 tangent at Q = u^2
geo::Tangent dtau(const Vec3& x, int m) {
    double s2 = 1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    double s = std::sqrt(s2);
    Quat u = half_point(x);
    Quat Q = u * u;
    Quat e = kUnits[m];
    Quat t = e * u;
    Quat t2 = u * e;
    return {(t.a + t2.a) / s - 2.0 * x[m] * Q.a / s2,
            (t.b + t2.b) / s - 2.0 * x[m] * Q.b / s2};
}

}  // namespace

geo::PointS3 stereographic_pullback(const Vec3& x) {
    Quat u = half_point(x);
    Quat Q = u * u;
    return geo::PointS3(Q.a, Q.b);
}

Vec3 stereographic_forward(const geo::PointS3& p) {
    // Q = (1 - x^2 + 2X)/(1 + x^2)  =>  X = (Q - q0)/(1 + q0), q0 = Re part
    double q0 = std::real(p.z1);
    if (q0 <= -1.0 + 1e-15)
        throw NumericError("stereographic_forward: the removed point has no preimage");
    double denom = 1.0 + q0;
    return {std::imag(p.z1) / denom, std::real(p.z2) / denom, -std::imag(p.z2) / denom};
}

Mat2 frame_intertwiner(const Vec3& x) {
    Quat u = half_point(x);
    // S(u) = [[a, -b], [conj b, conj a]]; V = Y S(u)^H with Y = i(s1+s3)/sqrt2
    Mat2 Sh = {std::conj(u.a), u.b, -std::conj(u.b), u.a};
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 Y = {iunit * r, iunit * r, iunit * r, -iunit * r};
    return matmul(Y, Sh);
}

Mat2 chart_intertwiner(const geo::PointS3& p) {
    if (std::abs(p.z2) < 1e-300)
        throw NumericError("chart_intertwiner: chart + breaks down on the fiber z2 = 0");
    double delta = 2.0 * std::arg(p.z2);
    cplx ph = std::polar(1.0, 0.5 * (0.5 * pi - delta));
    // sigma_1 * diag(ph, conj ph)
    return {cplx(0.0), std::conj(ph), ph, cplx(0.0)};
}

std::vector<S3KernelElement> kernel_elements(const bundle::FieldProfile& g,
                                             std::size_t n_theta) {
    auto fc = bundle::flux_and_constants(g);
    if (std::abs(fc.c - 0.5) > 1e-9)
        throw HypothesisViolation("kernel_elements: requires c = 1/2");
    std::vector<S3KernelElement> out;
    long kstar;
    if (fc.m > 0)
        kstar = 0;
    else if (fc.m < -1)
        kstar = -1;
    else
        return out;
    long n = fc.m - kstar;
    auto gN = bundle::reduced_flux_density(g, kstar, fc);
    auto gauge = std::make_shared<bundle::GaugeData>(bundle::build_gauge(gN, n));
    auto basis = ac::build_zero_modes(*gauge);
    double res = ac::residual_check(basis, n_theta);
    if (res > 1e-8)
        throw NumericError("kernel_elements: sector residual above 1e-8");
    for (const auto& m : basis.modes) {
        S3KernelElement e;
        e.k = kstar;
        e.c = fc.c;
        e.n = n;
        e.gauge = gauge;
        e.mode = m;
        e.sector_residual = res;
        out.push_back(std::move(e));
    }
    return out;
}

TransferredMode::TransferredMode(S3KernelElement elem) : elem_(std::move(elem)) {}

TransferredMode transfer_mode(const S3KernelElement& elem) { return TransferredMode(elem); }

TransferredMode transfer_mode_with_field(S3KernelElement elem,
                                         const bundle::FieldProfile& total_field) {
    TransferredMode m(std::move(elem));
    m.total_field_ = std::make_shared<bundle::FieldProfile>(total_field);
    return m;
}

Spinor TransferredMode::eval_psi(const Vec3& x_in) const {
    Vec3 x = x_in;
    geo::PointS3 p = stereographic_pullback(x);
    if (std::abs(p.z2) < 1e-13) {  // nudge off the chart-breaking axis
        x[1] += 1e-10 * (1.0 + std::abs(x[0]));
        p = stereographic_pullback(x);
    }
    cplx w = 2.0 * p.z1 / p.z2;
    double r = std::abs(w);
    const auto& mode = elem_.mode;
    double rad = mode.radial_plus(r) / std::sqrt(bundle::omega_N(r));
    long ang = mode.spin > 0 ? mode.j : mode.j + 1;
    cplx comp = rad * std::polar(1.0, static_cast<double>(ang) * std::arg(w));
    Spinor u_plus = mode.spin > 0 ? Spinor{comp, cplx(0.0)} : Spinor{cplx(0.0), comp};

    Mat2 T = matmul(frame_intertwiner(x), chart_intertwiner(p));
    Spinor chi = matvec(T, u_plus);
    // exact U(1) gauge removing the chart Dirac string from the x1 axis
    cplx string_phase =
        std::polar(1.0, static_cast<double>(string_winding()) * std::atan2(x[2], x[1]));
    double omega = 1.0 / (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return {omega * string_phase * chi[0], omega * string_phase * chi[1]};
}

long TransferredMode::string_winding() const {
    // near-axis phase of W u_+ : the upper chart component rides e^{-i arg z2}
    // through ph, the lower through conj(ph)
    long ang = elem_.mode.spin > 0 ? elem_.mode.j : elem_.mode.j + 1;
    return elem_.mode.spin > 0 ? -(1 + ang) : (1 - ang);
}

Vec3 TransferredMode::eval_A(const Vec3& x_in) const {
    Vec3 x = x_in;
    geo::PointS3 p = stereographic_pullback(x);
    if (std::abs(p.z2) < 1e-13) {
        x[1] += 1e-10 * (1.0 + std::abs(x[0]));
        p = stereographic_pullback(x);
    }
    cplx w = 2.0 * p.z1 / p.z2;
    cplx a_plus = elem_.gauge->a_plus(w);
    double kc = static_cast<double>(elem_.k) + elem_.c;
    geo::Tangent nvec = geo::frame_field(geo::FrameField::N, p.z1, p.z2);
    Vec3 A;
    for (int m = 0; m < 3; ++m) {
        geo::Tangent Y = dtau(x, m);
        cplx dphi = geo::hopf_pushforward(p, Y);
        double alphaN = 2.0 * std::real(std::conj(a_plus) * dphi);
        // nu is dual to -n in the chart orientation
        double nu = -geo::dot(nvec, Y);
        A[m] = alphaN - kc * nu;
    }
    // gradient of the string-removal phase
    double rho2 = x[1] * x[1] + x[2] * x[2];
    double sw = static_cast<double>(string_winding());
    A[1] += sw * (-x[2] / rho2);
    A[2] += sw * (x[1] / rho2);
    return A;
}

double TransferredMode::eval_Babs(const Vec3& x) const {
    geo::PointS3 p = stereographic_pullback(x);
    double theta = std::abs(p.z2) < 1e-13
                       ? pi
                       : bundle::chart_theta(std::abs(2.0 * p.z1 / p.z2));
    double gval;
    if (total_field_) {
        gval = total_field_->eval(theta);
    } else {
        // reduced-block strength plus the fiber term restores the total field
        gval = elem_.gauge->profile().eval(theta) +
               2.0 * (static_cast<double>(elem_.k) + elem_.c);
    }
    double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    double om = 2.0 / (1.0 + x2);
    return std::abs(gval) * om * om;
}

namespace {

struct GridData {
    std::vector<Vec3> points;
    std::vector<double> weights;
};

GridData make_grid(const R3GridSpec& g) {
    if (g.n_r < 3 || g.n_r % 2 == 0)
        throw ValidationError("R3GridSpec: n_r must be odd and >= 3");
    GridData out;
    double L0 = std::log(g.r_min), L1 = std::log(g.r_max);
    double dl = (L1 - L0) / static_cast<double>(g.n_r - 1);
    std::vector<double> ct, wt;
    lin::gauss_legendre(static_cast<int>(g.n_theta), -1.0, 1.0, ct, wt);
    double dphi = 2.0 * pi / static_cast<double>(g.n_phi);
    for (std::size_t ir = 0; ir < g.n_r; ++ir) {
        double r = std::exp(L0 + dl * static_cast<double>(ir));
        // composite Simpson weights in log r
        double sw = (ir == 0 || ir + 1 == g.n_r) ? 1.0 : (ir % 2 == 1 ? 4.0 : 2.0);
        double wr = sw * dl / 3.0 * r * r * r;
        for (std::size_t it = 0; it < g.n_theta; ++it) {
            double st = std::sqrt(std::max(0.0, 1.0 - ct[it] * ct[it]));
            for (std::size_t ip = 0; ip < g.n_phi; ++ip) {
                // polar axis along x3; the half-step phi offset keeps nodes
                // off the chart-breaking x1 axis
                double phi = dphi * (static_cast<double>(ip) + 0.5);
                out.points.push_back({r * st * std::cos(phi), r * st * std::sin(phi),
                                      r * ct[it]});
                out.weights.push_back(wr * wt[it] * dphi);
            }
        }
    }
    return out;
}

}  // namespace

R3SpinorSample transfer_zero_mode(const TransferredMode& mode, const R3GridSpec& grid) {
    GridData g = make_grid(grid);
    R3SpinorSample out;
    out.points = std::move(g.points);
    out.weights = std::move(g.weights);
    out.values.resize(out.points.size());
    parallel_for(out.points.size(),
                 [&](std::size_t i) { out.values[i] = mode.eval_psi(out.points[i]); });

    KahanSum norm;
    for (std::size_t i = 0; i < out.points.size(); ++i)
        norm.add(out.weights[i] * (std::norm(out.values[i][0]) + std::norm(out.values[i][1])));
    out.norm_raw = norm.value();
    if (!std::isfinite(out.norm_raw))
        throw NonConvergentNorm("transfer_zero_mode: norm not finite");

    // tail estimate: |psi|^2 ~ C r^-4 beyond the grid adds C 4 pi / R
    double C = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        const Vec3& x = out.points[i];
        double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if (r2 >= 0.98 * grid.r_max * grid.r_max) {
            C += (std::norm(out.values[i][0]) + std::norm(out.values[i][1])) * r2 * r2;
            ++count;
        }
    }
    if (count > 0) C /= static_cast<double>(count);
    out.norm_corrected = out.norm_raw + 4.0 * pi * C / grid.r_max;

    // growth guard: the mass beyond r_max/10 must be a saturating tail
    double inner = 0.0, total = 0.0;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        const Vec3& x = out.points[i];
        double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        double c = out.weights[i] * (std::norm(out.values[i][0]) + std::norm(out.values[i][1]));
        if (r <= 0.1 * grid.r_max) inner += c;
        total += c;
    }
    if (total > 1.5 * inner)
        throw NonConvergentNorm("transfer_zero_mode: norm keeps growing with the domain");
    return out;
}

double flat_dirac_residual(const std::function<Spinor(const Vec3&)>& psi,
                           const std::function<Vec3(const Vec3&)>& A,
                           const std::vector<Vec3>& points,
                           const std::vector<double>& weights, double step) {
    static const Mat2 sigma[3] = {{cplx(0), cplx(1), cplx(1), cplx(0)},
                                  {cplx(0), -iunit, iunit, cplx(0)},
                                  {cplx(1), cplx(0), cplx(0), cplx(-1)}};
    std::vector<double> num(points.size()), den(points.size());
    parallel_for(points.size(), [&](std::size_t idx) {
        const Vec3& x = points[idx];
        double h = step * (1.0 + std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        Vec3 Ax = A(x);
        Spinor px = psi(x);
        Spinor D = {cplx(0.0), cplx(0.0)};
        for (int m = 0; m < 3; ++m) {
            auto at = [&](double t) {
                Vec3 y = x;
                y[m] += t;
                return psi(y);
            };
            Spinor p1 = at(h), m1 = at(-h), p2 = at(2 * h), m2 = at(-2 * h);
            Spinor grad;
            for (int c = 0; c < 2; ++c)
                grad[c] = -iunit * (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * h) -
                          Ax[m] * px[c];
            const Mat2& s = sigma[m];
            D[0] += s[0] * grad[0] + s[1] * grad[1];
            D[1] += s[2] * grad[0] + s[3] * grad[1];
        }
        num[idx] = weights[idx] * (std::norm(D[0]) + std::norm(D[1]));
        den[idx] = weights[idx] * (std::norm(px[0]) + std::norm(px[1]));
    });
    KahanSum n2, d2;
    for (double v : num) n2.add(v);
    for (double v : den) d2.add(v);
    if (d2.value() <= 0.0) throw NumericError("flat_dirac_residual: zero field");
    return std::sqrt(n2.value() / d2.value());
}

double r3_dirac_residual(const TransferredMode& mode, const R3GridSpec& grid,
                         double step_scale) {
    GridData g = make_grid(grid);
    return flat_dirac_residual([&](const Vec3& x) { return mode.eval_psi(x); },
                               [&](const Vec3& x) { return mode.eval_A(x); }, g.points,
                               g.weights, step_scale);
}

double profile_deviation(const TransferredMode& mode, const R3GridSpec& grid) {
    GridData g = make_grid(grid);
    std::vector<double> ratio(g.points.size());
    parallel_for(g.points.size(), [&](std::size_t i) {
        Spinor v = mode.eval_psi(g.points[i]);
        const Vec3& x = g.points[i];
        double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        ratio[i] = std::sqrt(std::norm(v[0]) + std::norm(v[1])) * (1.0 + x2);
    });
    double mean = 0.0;
    for (double v : ratio) mean += v;
    mean /= static_cast<double>(ratio.size());
    double worst = 0.0;
    for (double v : ratio) worst = std::max(worst, std::abs(v - mean) / mean);
    return worst;
}

}  // namespace hopfdirac::r3

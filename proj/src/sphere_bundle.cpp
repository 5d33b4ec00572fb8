#include "hopfdirac/sphere_bundle.hpp"

#include <algorithm>
#include <cmath>

#include "hopfdirac/linalg.hpp"

namespace hopfdirac::bundle {

namespace {

// Fritsch-Carlson monotone cubic slopes
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n == 1) return d;
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // clamp endpoint slopes (Fritsch-Carlson endpoint rule)
    auto clamp_end = [&](std::size_t i, double del) {
        if (del == 0.0)
            d[i] = 0.0;
        else if (d[i] * del < 0.0)
            d[i] = 0.0;
        else if (std::abs(d[i]) > 3.0 * std::abs(del))
            d[i] = 3.0 * del;
    };
    clamp_end(0, delta[0]);
    clamp_end(n - 1, delta[n - 2]);
    return d;
}

double hermite_eval(double x0, double x1, double y0, double y1, double d0, double d1,
                    double x) {
    double h = x1 - x0;
    double t = (x - x0) / h;
    double t2 = t * t, t3 = t2 * t;
    return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) +
           y1 * (-2 * t3 + 3 * t2) + h * d1 * (t3 - t2);
}

}  // namespace

FieldProfile FieldProfile::constant(double g0) {
    if (!std::isfinite(g0)) throw ValidationError("FieldProfile: non-finite constant");
    FieldProfile p;
    p.kind_ = Kind::Constant;
    p.g0_ = g0;
    return p;
}

FieldProfile FieldProfile::sampled(std::vector<double> theta_nodes,
                                   std::vector<double> values) {
    if (theta_nodes.size() < 2 || theta_nodes.size() != values.size())
        throw ValidationError("FieldProfile: need matching node/value lists (>= 2 entries)");
    for (std::size_t i = 0; i + 1 < theta_nodes.size(); ++i) {
        if (!(theta_nodes[i] < theta_nodes[i + 1]))
            throw ValidationError("FieldProfile: theta nodes not strictly increasing at pair (" +
                                  std::to_string(theta_nodes[i]) + ", " +
                                  std::to_string(theta_nodes[i + 1]) + ")");
    }
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("FieldProfile: non-finite sample value");
    if (std::abs(theta_nodes.front()) > 1e-9 || std::abs(theta_nodes.back() - pi) > 1e-9)
        throw ValidationError("FieldProfile: nodes must cover [0, pi] endpoints");
    theta_nodes.front() = 0.0;
    theta_nodes.back() = pi;

    FieldProfile p;
    p.kind_ = Kind::Sampled;
    p.theta_ = std::move(theta_nodes);
    p.val_ = std::move(values);
    p.slope_ = pchip_slopes(p.theta_, p.val_);

    // cumulative integral of g(t) sin t at the nodes (GL-12 per interval)
    p.cumcap_.assign(p.theta_.size(), 0.0);
    std::vector<double> gx, gw;
    for (std::size_t i = 0; i + 1 < p.theta_.size(); ++i) {
        lin::gauss_legendre(12, p.theta_[i], p.theta_[i + 1], gx, gw);
        double s = 0.0;
        for (std::size_t q = 0; q < gx.size(); ++q)
            s += gw[q] * p.eval_base(gx[q]) * std::sin(gx[q]);
        p.cumcap_[i + 1] = p.cumcap_[i] + s;
    }
    return p;
}

FieldProfile FieldProfile::with_offset(double delta) const {
    FieldProfile p = *this;
    p.offset_ += delta;
    return p;
}

double FieldProfile::eval_base(double theta) const {
    if (kind_ == Kind::Constant) return g0_;
    if (theta <= theta_.front()) return val_.front();
    if (theta >= theta_.back()) return val_.back();
    auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
    std::size_t i = static_cast<std::size_t>(it - theta_.begin()) - 1;
    return hermite_eval(theta_[i], theta_[i + 1], val_[i], val_[i + 1], slope_[i],
                        slope_[i + 1], theta);
}

double FieldProfile::eval(double theta) const { return eval_base(theta) + offset_; }

double FieldProfile::cap_sin_integral(double theta) const {
    theta = std::clamp(theta, 0.0, pi);
    double base;
    if (kind_ == Kind::Constant) {
        base = g0_ * (1.0 - std::cos(theta));
    } else {
        auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
        std::size_t i = std::min(static_cast<std::size_t>(it - theta_.begin()),
                                 theta_.size() - 1);
        if (i == 0) i = 1;
        base = cumcap_[i - 1];
        if (theta > theta_[i - 1]) {
            std::vector<double> gx, gw;
            lin::gauss_legendre(12, theta_[i - 1], theta, gx, gw);
            for (std::size_t q = 0; q < gx.size(); ++q)
                base += gw[q] * eval_base(gx[q]) * std::sin(gx[q]);
        }
    }
    return base + offset_ * (1.0 - std::cos(theta));
}

std::pair<double, long> fractional_split(double x) {
    if (!std::isfinite(x)) throw ValidationError("fractional_split: non-finite input");
    long m = static_cast<long>(std::ceil(x - 0.5));
    return {x - static_cast<double>(m), m};
}

FluxConstants flux_and_constants(const FieldProfile& g) {
    double total = g.total_flux();
    if (!std::isfinite(total)) throw ValidationError("flux_and_constants: non-finite flux");
    // half-integer snap so floating rounding cannot flip m at the boundary
    double t2 = 2.0 * total;
    double r2 = std::round(t2);
    if (std::abs(t2 - r2) <= 1e-12 * std::max(1.0, std::abs(t2))) total = 0.5 * r2;
    auto [c, m] = fractional_split(total);
    return {total, c, m};
}

FieldProfile reduced_flux_density(const FieldProfile& g, long k, const FluxConstants& fc) {
    return g.with_offset(-2.0 * (fc.c + static_cast<double>(k)));
}

// ---- gauge construction -------------------------------------------------

GaugeData build_gauge(const FieldProfile& gN, long n, std::size_t grid_nodes, double r_min,
                      double r_max) {
    double flux = gN.total_flux();
    if (std::abs(flux - static_cast<double>(n)) > 1e-9)
        throw FluxMismatch("build_gauge: profile flux " + std::to_string(flux) +
                           " does not match Chern number " + std::to_string(n));
    if (grid_nodes < 16) throw ValidationError("build_gauge: grid too small");

    GaugeData gd;
    gd.n_ = n;
    gd.profile_ = gN;

    if (gN.kind() == FieldProfile::Kind::Constant) {
        gd.constant_ = true;
        gd.gconst_ = gN.eval(0.0);
    }

    gd.r_.resize(grid_nodes);
    gd.hg_.resize(grid_nodes);
    gd.dhg_.resize(grid_nodes);
    gd.x0_ = std::log(r_min);
    gd.dx_ = (std::log(r_max) - std::log(r_min)) / static_cast<double>(grid_nodes - 1);
    for (std::size_t i = 0; i < grid_nodes; ++i)
        gd.r_[i] = std::exp(gd.x0_ + gd.dx_ * static_cast<double>(i));

    if (gd.constant_) {
        for (std::size_t i = 0; i < grid_nodes; ++i) {
            double r = gd.r_[i];
            gd.hg_[i] = gd.gconst_ * std::log(4.0 + r * r);
            gd.dhg_[i] = 2.0 * gd.gconst_ * r / (4.0 + r * r);
        }
        return gd;
    }

    // h(r) = (2/pi) [ log(r) Phi(r) + T(r) ],   T(r) = int_r^inf log r' dPhi(r')
    std::vector<double> theta(grid_nodes), Phi(grid_nodes), T(grid_nodes);
    for (std::size_t i = 0; i < grid_nodes; ++i) {
        theta[i] = chart_theta(gd.r_[i]);
        Phi[i] = 0.5 * pi * gN.cap_sin_integral(theta[i]);
    }
    auto tail_integrand = [&](double th) {
        double r = chart_radius(th);
        return 0.5 * pi * std::log(r) * gN.eval(th) * std::sin(th);
    };
    std::vector<double> gx, gw;
    // tail beyond the grid
    double tail = 0.0;
    lin::gauss_legendre(32, theta.back(), pi, gx, gw);
    for (std::size_t q = 0; q < gx.size(); ++q) tail += gw[q] * tail_integrand(gx[q]);
    T[grid_nodes - 1] = tail;
    for (std::size_t i = grid_nodes - 1; i-- > 0;) {
        lin::gauss_legendre(12, theta[i], theta[i + 1], gx, gw);
        double s = 0.0;
        for (std::size_t q = 0; q < gx.size(); ++q) s += gw[q] * tail_integrand(gx[q]);
        T[i] = T[i + 1] + s;
    }
    for (std::size_t i = 0; i < grid_nodes; ++i) {
        gd.hg_[i] = (2.0 / pi) * (std::log(gd.r_[i]) * Phi[i] + T[i]);
        gd.dhg_[i] = 2.0 * Phi[i] / (pi * gd.r_[i]);
        if (!std::isfinite(gd.hg_[i]))
            throw QuadratureFailure("build_gauge: radial integral did not converge");
    }
    return gd;
}

GaugeData ring_gauge(long n, double r0) {
    if (!(r0 > 0.0)) throw ValidationError("ring_gauge: radius must be positive");
    GaugeData gd;
    gd.n_ = n;
    gd.ring_ = true;
    gd.ring_r0_ = r0;
    gd.r_ = {r0};
    gd.hg_ = {4.0 * static_cast<double>(n) * std::log(r0)};
    gd.dhg_ = {0.0};
    return gd;
}

double GaugeData::chart_flux(double r) const {
    if (ring_) return r < ring_r0_ ? 0.0 : 2.0 * pi * static_cast<double>(n_);
    if (constant_) return pi * gconst_ * r * r / (4.0 + r * r);
    return 0.5 * pi * profile_.cap_sin_integral(chart_theta(r));
}

double GaugeData::density(double r) const {
    if (ring_) return 0.0;  // distributional
    double om = omega_N(r);
    return profile_.eval(chart_theta(r)) * om * om;
}

double GaugeData::dh(double r) const {
    if (r <= 0.0) return 0.0;
    if (ring_) return r < ring_r0_ ? 0.0 : 4.0 * static_cast<double>(n_) / r;
    return 2.0 * chart_flux(r) / (pi * r);
}

double GaugeData::h(double r) const {
    if (ring_) return 4.0 * static_cast<double>(n_) * std::log(std::max(r, ring_r0_));
    if (constant_) return gconst_ * std::log(4.0 + r * r);
    r = std::max(r, 1e-300);
    double x = std::log(r);
    std::vector<double> gx, gw;
    if (x <= x0_) {
        // below the grid: integrate dh down from the first node (smooth, ~ r)
        double val = hg_.front();
        lin::gauss_legendre(16, r, r_.front(), gx, gw);
        for (std::size_t q = 0; q < gx.size(); ++q) val -= gw[q] * dh(gx[q]);
        return val;
    }
    double xmax = x0_ + dx_ * static_cast<double>(r_.size() - 1);
    if (x >= xmax) {
        // above the grid: integrate dh in the log variable
        double val = hg_.back();
        lin::gauss_legendre(16, xmax, x, gx, gw);
        for (std::size_t q = 0; q < gx.size(); ++q) {
            double s = std::exp(gx[q]);
            val += gw[q] * dh(s) * s;
        }
        return val;
    }
    std::size_t i = std::min(static_cast<std::size_t>((x - x0_) / dx_), r_.size() - 2);
    double xi = x0_ + dx_ * static_cast<double>(i);
    // Hermite in the log variable with exact nodal derivatives dh/dx = r dh/dr
    return hermite_eval(xi, xi + dx_, hg_[i], hg_[i + 1], dhg_[i] * r_[i],
                        dhg_[i + 1] * r_[i + 1], x);
}

double GaugeData::kappa(double theta) const {
    double s = std::sin(theta);
    if (s <= 0.0) return 0.0;
    return chart_flux(chart_radius(theta)) / (pi * s);
}

double GaugeData::kappa_reg(double theta) const {
    if (constant_) return 0.0;
    return kappa(theta) - static_cast<double>(n_) * std::tan(0.5 * theta);
}

double GaugeData::kappa_integral(double t0, double t1) const {
    const double n = static_cast<double>(n_);
    // model part: integral of n tan(theta/2) = -2 n log cos(theta/2)
    auto model = [&](double a, double b) {
        return -2.0 * n * (std::log(std::cos(0.5 * b)) - std::log(std::cos(0.5 * a)));
    };
    if (constant_) return model(t0, t1);
    if (ring_) {
        // kappa = 0 below the ring, 2n/sin above; primitive 2n log tan(theta/2)
        double tring = chart_theta(ring_r0_);
        auto upper = [&](double a, double b) {
            return 2.0 * n * (std::log(std::tan(0.5 * b)) - std::log(std::tan(0.5 * a)));
        };
        if (t1 <= tring) return 0.0;
        if (t0 >= tring) return upper(t0, t1);
        return upper(tring, t1);
    }
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += gw[q] * kappa_reg(mid + half * gx[q]);
    return model(t0, t1) + s * half;
}

cplx GaugeData::a_plus(cplx z) const {
    double r = std::abs(z);
    if (r == 0.0) return 0.0;
    return iunit * 0.125 * dh(r) * (z / r);
}

cplx GaugeData::a_minus(cplx z) const {
    double r = std::abs(z);
    if (r == 0.0) {
        // smooth continuation through the south pole chart origin
        return 0.0;
    }
    cplx zb = std::conj(z);
    cplx w = -4.0 / z;
    return 4.0 / (zb * zb) * a_plus(w) + iunit * 0.5 * static_cast<double>(n_) / zb;
}

double chart_flux_check(const GaugeData& gauge, std::size_t quad_points) {
    // trapezoid on the smooth periodic integrand, both charts on |z| = 2
    const double dt = 2.0 * pi / static_cast<double>(quad_points);
    KahanSum s;
    for (std::size_t k = 0; k < quad_points; ++k) {
        double t = dt * static_cast<double>(k);
        cplx z = 2.0 * std::polar(1.0, t);
        cplx dzbar = -2.0 * iunit * std::polar(1.0, -t);
        s.add(2.0 * std::real(gauge.a_plus(z) * dzbar) * dt);
        s.add(2.0 * std::real(gauge.a_minus(z) * dzbar) * dt);
    }
    return s.value();
}

// ---- chart spinor fields -------------------------------------------------

cplx transition_U(long n, cplx z) {
    return std::polar(1.0, -static_cast<double>(n) * std::arg(z));
}

std::array<cplx, 2> transition_W_diag(cplx z) {
    double a = std::arg(z);
    return {std::polar(1.0, a), std::polar(1.0, -a)};
}

namespace {

std::array<cplx, 2> bilinear(const std::vector<double>& r, const std::vector<double>& phi,
                             const std::vector<cplx>& grid, cplx z) {
    const std::size_t nr = r.size(), np = phi.size();
    double rr = std::abs(z);
    double x = std::log(std::clamp(rr, r.front(), r.back()));
    double x0 = std::log(r.front());
    double dx = (std::log(r.back()) - x0) / static_cast<double>(nr - 1);
    std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, (x - x0) / dx)), nr - 2);
    double tx = (x - (x0 + dx * static_cast<double>(i))) / dx;

    double a = std::arg(z);
    if (a < 0) a += 2.0 * pi;
    double dp = 2.0 * pi / static_cast<double>(np);
    std::size_t j = std::min(static_cast<std::size_t>(a / dp), np - 1);
    double tp = (a - dp * static_cast<double>(j)) / dp;
    std::size_t j1 = (j + 1) % np;

    std::array<cplx, 2> out;
    for (int comp = 0; comp < 2; ++comp) {
        auto at = [&](std::size_t ir, std::size_t ip) {
            return grid[(ir * np + ip) * 2 + static_cast<std::size_t>(comp)];
        };
        out[static_cast<std::size_t>(comp)] =
            (1 - tx) * ((1 - tp) * at(i, j) + tp * at(i, j1)) +
            tx * ((1 - tp) * at(i + 1, j) + tp * at(i + 1, j1));
    }
    return out;
}

}  // namespace

std::array<cplx, 2> ChartSpinorField::eval_plus(cplx z) const {
    return bilinear(r, phi, plus_grid, z);
}
std::array<cplx, 2> ChartSpinorField::eval_minus(cplx z) const {
    return bilinear(r, phi, minus_grid, z);
}

double ChartSpinorField::transition_residual() const {
    double worst = 0.0, scale = 0.0;
    for (const auto& v : plus_grid) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (double rr : r) {
        if (rr < 1.0 || rr > 4.0) continue;
        for (double a : phi) {
            cplx z = std::polar(rr, a);
            auto up = eval_plus(z);
            auto um = eval_minus(-4.0 / z);
            cplx U = transition_U(chern, z);
            auto W = transition_W_diag(z);
            worst = std::max(worst, std::abs(um[0] - U * W[0] * up[0]) / scale);
            worst = std::max(worst, std::abs(um[1] - U * W[1] * up[1]) / scale);
        }
    }
    return worst;
}

}  // namespace hopfdirac::bundle

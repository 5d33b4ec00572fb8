#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hopfdirac/common.hpp"

namespace hopfdirac::bundle {

// chart-+ coordinate r = 2 tan(theta/2); N = (S^2, g_2/4)
inline double chart_radius(double theta) { return 2.0 * std::tan(0.5 * theta); }
inline double chart_theta(double r) { return 2.0 * std::atan(0.5 * r); }
inline double omega_N(double r) { return 0.5 / (1.0 + 0.25 * r * r); }

// Axisymmetric field strength g(theta) on N: constant, or sampled nodes
// interpolated by a monotone cubic; `offset` carries the -2(c+k) reduction.
class FieldProfile {
public:
    enum class Kind { Constant, Sampled };

    static FieldProfile constant(double g0);
    static FieldProfile sampled(std::vector<double> theta_nodes, std::vector<double> values);

    Kind kind() const { return kind_; }
    double offset() const { return offset_; }
    FieldProfile with_offset(double delta) const;

    double eval(double theta) const;
    // integral of g(t) sin t over [0, theta], exact for the interpolant
    double cap_sin_integral(double theta) const;
    // (1/2pi) * integral of g vol_N over the whole of N
    double total_flux() const { return 0.25 * cap_sin_integral(pi); }

    const std::vector<double>& nodes() const { return theta_; }
    const std::vector<double>& values() const { return val_; }
    double g0() const { return g0_; }

private:
    FieldProfile() = default;
    double eval_base(double theta) const;
    Kind kind_ = Kind::Constant;
    double g0_ = 0.0;
    double offset_ = 0.0;
    std::vector<double> theta_, val_, slope_;
    std::vector<double> cumcap_;  // cap integral of the base profile at nodes
};

struct FluxConstants {
    double total_flux = 0.0;
    double c = 0.0;  // in (-1/2, 1/2]
    long m = 0;      // total_flux = m + c
};

// <x> in (-1/2,1/2] and [x] = x - <x>
std::pair<double, long> fractional_split(double x);

FluxConstants flux_and_constants(const FieldProfile& g);

FieldProfile reduced_flux_density(const FieldProfile& g, long k, const FluxConstants& fc);

// Gauge data on the two stereographic charts for a prescribed axisymmetric
// flux density with Chern number n: radial potential h_+ built from the
// logarithmic kernel, a_+ = (i/4) dh/dzbar, a_- by the transition relation.
class GaugeData {
public:
    long chern() const { return n_; }

    double h(double r) const;
    double dh(double r) const;          // dh/dr, exact: 2 Phi(r) / (pi r)
    double chart_flux(double r) const;  // Phi(r), flux through |z| <= r
    double density(double r) const;     // b(r), flat chart density

    cplx a_plus(cplx z) const;
    cplx a_minus(cplx z) const;

    const std::vector<double>& r_grid() const { return r_; }
    const std::vector<double>& h_grid() const { return hg_; }
    const std::vector<double>& dh_grid() const { return dhg_; }
    const FieldProfile& profile() const { return profile_; }

    // theta-space potential term of the reduced operator:
    //   kappa(theta) = Phi(r(theta)) / (pi sin theta)
    double kappa(double theta) const;

    // kappa minus its closed-form constant-field model n tan(theta/2);
    // smooth and vanishing at both poles, identically zero for constant g_N
    double kappa_reg(double theta) const;
    bool kappa_reg_is_zero() const { return constant_; }

    // integral of kappa over [t0, t1]: closed form for constant and ring
    // gauges (including across the ring kink), model + quadrature otherwise
    double kappa_integral(double t0, double t1) const;

    friend GaugeData build_gauge(const FieldProfile& gN, long n, std::size_t grid_nodes,
                                 double r_min, double r_max);
    friend GaugeData ring_gauge(long n, double r0);

private:
    GaugeData() = default;
    long n_ = 0;
    bool constant_ = false;   // closed-form path (constant g_N)
    bool ring_ = false;       // closed-form ring fixture
    double gconst_ = 0.0;
    double ring_r0_ = 1.0;
    FieldProfile profile_ = FieldProfile::constant(0.0);
    std::vector<double> r_, hg_, dhg_;  // log-spaced grid and samples
    double x0_ = 0.0, dx_ = 1.0;        // log-grid parameters
};

GaugeData build_gauge(const FieldProfile& gN, long n, std::size_t grid_nodes = 4096,
                      double r_min = 1e-6, double r_max = 1e6);

// Exact fixture: all flux 2 pi n concentrated on the circle |z| = r0;
// h(r) = 4 n log max(r, r0).
GaugeData ring_gauge(long n, double r0);

// Contour integral of alpha_+ + alpha_- over |z| = 2 (trapezoid); equals
// 2 pi n for a consistent gauge.
double chart_flux_check(const GaugeData& gauge, std::size_t quad_points = 1024);

// Spinor section sampled on polar grids of both charts, linked by
// u_-(-4/z) = U_n(z) W(z) u_+(z).
struct ChartSpinorField {
    long chern = 0;
    std::vector<double> r;    // log-spaced radii, shared by both charts
    std::vector<double> phi;  // uniform angles in [0, 2pi)
    // layout: [ir * nphi + iphi] * 2 + component
    std::vector<cplx> plus_grid;
    std::vector<cplx> minus_grid;

    std::array<cplx, 2> eval_plus(cplx z) const;
    std::array<cplx, 2> eval_minus(cplx z) const;
    // max residual of the transition relation on 1 <= |z_+| <= 4
    double transition_residual() const;
};

// transition factors of Eq. psin
cplx transition_U(long n, cplx z);
std::array<cplx, 2> transition_W_diag(cplx z);

}  // namespace hopfdirac::bundle

#pragma once

#include <vector>

#include "hopfdirac/dirac2d.hpp"
#include "hopfdirac/sphere_bundle.hpp"

namespace hopfdirac::ac {

// One explicit zero mode v = f e^{-h/4}: monomial degree ell in the chart
// where f is polynomial, carried as radial data per azimuthal sector.
struct ZeroMode {
    long ell = 0;   // f_-(z) = z^ell for n > 0 (mirror for n < 0)
    long j = 0;     // chart-+ azimuthal sector of the carrying component
    int spin = 0;   // +1 upper, -1 lower
    // flat chart-+ radial profile of the carrying component (other one is 0)
    std::function<double(double)> radial_plus;
};

struct ZeroModeBasis {
    long n = 0;
    int spin = 0;
    std::vector<ZeroMode> modes;
    std::vector<bundle::ChartSpinorField> fields;  // sampled two-chart grids
    std::vector<double> gram;                      // row-major |n| x |n|
    double gram_condition = 1.0;
    const bundle::GaugeData* h_source = nullptr;
};

struct ZeroModeGridSpec {
    std::size_t n_r = 192;
    std::size_t n_phi = 48;
    double r_min = 1e-3;
    double r_max = 1e3;
};

// Aharonov-Casher construction: for n > 0 the modes live in the upper component with
// f_- in {1, z, ..., z^{n-1}}; for n < 0 mirrored in the lower component.
// n = 0 returns an empty basis.
ZeroModeBasis build_zero_modes(const bundle::GaugeData& gauge,
                               const ZeroModeGridSpec& grid = {});

// Applies the discretized sector operator (same stencils as dirac2d) to each
// mode; returns the max L2 residual relative to the mode norm.
double residual_check(const ZeroModeBasis& basis, std::size_t n_grid);

// Largest principal angle (radians) between the eigensolver kernel and the
// explicit basis, sector by sector.
double subspace_angle_vs_solver(const ZeroModeBasis& basis, std::size_t n_theta,
                                d2::PoleBC bc = d2::PoleBC::Power);

}  // namespace hopfdirac::ac

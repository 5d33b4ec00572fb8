#pragma once

#include <map>
#include <vector>

#include "hopfdirac/linalg.hpp"
#include "hopfdirac/sphere_bundle.hpp"

namespace hopfdirac::d2 {

// Pole handling: `Power` places each component on the staggered sublattice
// selected by the sector index and drops surplus pole-nearest nodes where the
// regularity power is largest; `Dirichlet` uses the square (index-blind)
// layout for robustness comparison.
enum class PoleBC { Power, Dirichlet };

// Azimuthal sector of D_N on the bundle with Chern number n, reduced to a
// radial first-order system on a uniform theta-lattice. Components are
// staggered: F (upper, spin +) and G (lower, spin -) live on alternating
// sites tau_m = m h / 2, h = pi / N_theta, and the measure is folded in so
// the matrix is Hermitian tridiagonal with zero diagonal.
class SectorOperator {
public:
    long j() const { return j_; }
    long chern() const { return n_; }
    std::size_t n_theta() const { return n_theta_; }
    std::size_t size() const { return theta_.size(); }
    double lattice_h() const { return h_; }

    // per-unknown data
    const std::vector<double>& thetas() const { return theta_; }
    const std::vector<int>& spin_signs() const { return spin_; }  // +1 F, -1 G
    const std::vector<cplx>& off_diagonal() const { return off_; }
    std::vector<double> weights() const {
        return std::vector<double>(size(), h_);
    }

    // continuum sector index: +1, -1 or 0 zero modes of definite spin
    static int analytic_index(long j, long n);

    std::vector<double> eigenvalues() const;
    std::pair<double, std::vector<cplx>> eigenvector_near(double shift, Rng& rng) const;
    std::vector<cplx> apply(std::span<const cplx> x) const;

    lin::HermitianMatrix dense() const;  // small sizes only
    double hermiticity_residual() const;

    // sample a flat chart-+ radial function v(r) (angular part stripped) into
    // the unknown vector: F-sites get sqrt(tan(theta/2)) v(r(theta)) when
    // `spin` = +1, G-sites when -1; the other component is zero.
    std::vector<cplx> sample_radial(const std::function<double(double)>& v, int spin) const;

    friend SectorOperator reduce_axisymmetric(const bundle::GaugeData& gauge, long j,
                                              std::size_t n_theta, PoleBC bc);

private:
    SectorOperator() = default;
    long j_ = 0, n_ = 0;
    std::size_t n_theta_ = 0;
    double h_ = 0.0;
    PoleBC bc_ = PoleBC::Power;
    std::vector<double> theta_;
    std::vector<int> spin_;
    std::vector<cplx> off_;
};

SectorOperator reduce_axisymmetric(const bundle::GaugeData& gauge, long j,
                                   std::size_t n_theta, PoleBC bc = PoleBC::Power);

std::vector<double> solve_sector(const SectorOperator& op);

struct EigenvalueLine {
    double value = 0.0;
    long multiplicity = 0;
};

struct ZeroModeInfo {
    long count = 0;
    int spin = 0;  // +1 / -1, 0 when count == 0
};

struct Spectrum2D {
    long n = 0;
    std::vector<EigenvalueLine> eigenvalues;        // merged, ascending
    ZeroModeInfo zero_modes;
    std::map<long, std::vector<double>> sector_table;  // j -> ascending list
    // positive spectrum with per-value multiplicity, for the 3-D assembly
    std::vector<EigenvalueLine> positive_lines() const;
};

struct Spectrum2DOptions {
    PoleBC pole_bc = PoleBC::Power;
    double merge_tol = 1e-6;       // relative
    double zero_tol = 1e-4;        // relative to the spectral gap
    int richardson_levels = 1;     // 2 = one grid doubling extrapolation
    long max_sectors = 1024;
};

Spectrum2D spectrum_2d(const bundle::GaugeData& gauge, double energy_max,
                       std::size_t n_theta, const Spectrum2DOptions& opts = {});

}  // namespace hopfdirac::d2

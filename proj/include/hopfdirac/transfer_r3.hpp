#pragma once

#include <array>
#include <memory>

#include "hopfdirac/aharonov_casher.hpp"
#include "hopfdirac/hopf_geometry.hpp"
#include "hopfdirac/sphere_bundle.hpp"

namespace hopfdirac::r3 {

using Vec3 = std::array<double, 3>;
using Spinor = std::array<cplx, 2>;
using Mat2 = std::array<cplx, 4>;  // row-major 2x2

// Inverse stereographic projection onto the unit S^3 (removed point
// (-1, 0)); the third axis is reflected so the pushed-forward frame carries
// the same orientation class as the Hopf frame.
geo::PointS3 stereographic_pullback(const Vec3& x);
// forward projection; throws on the removed point
Vec3 stereographic_forward(const geo::PointS3& p);

// SU(2) intertwiner from the S^3 global frame trivialization to the
// Cartesian R^3 one at x (closed form, smooth on all of R^3)
Mat2 frame_intertwiner(const Vec3& x);
// U(2) map from the chart-+ trivialization of the pulled-back bundle to the
// global one; defined away from the fiber z2 = 0 (the x1 axis)
Mat2 chart_intertwiner(const geo::PointS3& p);

// verified kernel element of the gauged block Dt_{M,(k)}
struct S3KernelElement {
    long k = 0;
    double c = 0.0;
    long n = 0;  // m - k
    std::shared_ptr<const bundle::GaugeData> gauge;
    ac::ZeroMode mode;
    double sector_residual = 0.0;
};

// the kernel basis of D_M for a c = 1/2 field, as gauged-block elements
std::vector<S3KernelElement> kernel_elements(const bundle::FieldProfile& g,
                                             std::size_t n_theta = 1024);

// psi(x) = Omega(x) V(x) W(tau(x)) u_+(w), A = tau^*(phi^*(alpha_N) - (c+k) nu)
class TransferredMode {
public:
    explicit TransferredMode(S3KernelElement elem);
    Spinor eval_psi(const Vec3& x) const;
    Vec3 eval_A(const Vec3& x) const;
    double eval_Babs(const Vec3& x) const;  // flat-space |B|
    const S3KernelElement& element() const { return elem_; }
    // winding of the exact U(1) gauge that removes the chart Dirac string
    long string_winding() const;

private:
    S3KernelElement elem_;
    std::shared_ptr<const bundle::FieldProfile> total_field_;
    friend TransferredMode transfer_mode_with_field(S3KernelElement,
                                                    const bundle::FieldProfile&);
};

TransferredMode transfer_mode(const S3KernelElement& elem);
TransferredMode transfer_mode_with_field(S3KernelElement elem,
                                         const bundle::FieldProfile& total_field);

struct R3GridSpec {
    double r_min = 1e-2;
    double r_max = 1e2;
    std::size_t n_r = 129;    // log-spaced radii (odd, Simpson weights)
    std::size_t n_theta = 24; // Gauss-Legendre in cos(theta)
    std::size_t n_phi = 24;   // uniform, half-step offset off the x1 axis
};

struct R3SpinorSample {
    std::vector<Vec3> points;
    std::vector<Spinor> values;
    std::vector<double> weights;
    double norm_raw = 0.0;        // grid quadrature of |psi|^2
    double norm_corrected = 0.0;  // with the fitted 1/R tail added
};

// Samples psi on the spherical grid; the reported norm must be stable under
// domain enlargement (tail-corrected), otherwise NonConvergentNorm.
R3SpinorSample transfer_zero_mode(const TransferredMode& mode, const R3GridSpec& grid);

// relative L2 residual of sigma.(-i grad - A) psi by fourth-order central
// differences of the callable field at the sample points
double r3_dirac_residual(const TransferredMode& mode, const R3GridSpec& grid,
                         double step_scale = 1e-2);

// the same stencil machinery on caller-supplied fields (plumbing checks)
double flat_dirac_residual(const std::function<Spinor(const Vec3&)>& psi,
                           const std::function<Vec3(const Vec3&)>& A,
                           const std::vector<Vec3>& points,
                           const std::vector<double>& weights, double step);

// max relative deviation of |psi| from C (1+x^2)^{-1} over the grid
double profile_deviation(const TransferredMode& mode, const R3GridSpec& grid);

}  // namespace hopfdirac::r3

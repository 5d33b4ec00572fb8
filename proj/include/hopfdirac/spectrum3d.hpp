#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopfdirac/dirac2d.hpp"
#include "hopfdirac/sphere_bundle.hpp"

namespace hopfdirac::s3 {

struct BranchOrigin {
    long k = 0;
    double lambda = 0.0;
    int branch = +1;  // sign of the square root
};
struct SkOrigin {
    long k = 0;
    int spin = 0;  // sgn(m - k)
};

struct SpectralLine {
    double value = 0.0;
    long multiplicity = 0;
    bool is_sk = false;
    long k = 0;
    double lambda = 0.0;  // branch lines only
    int branch = 0;       // +1 / -1, 0 for S_k
    int spin = 0;         // S_k lines only
};

struct MergeCollision {
    double value_a = 0.0, value_b = 0.0;
    std::string note;
};

struct KDiagnostics {
    long k = 0;
    long chern = 0;          // m - k
    long sectors_solved = 0;
    long zero_modes = 0;
    double lambda_window = 0.0;
};

struct SpectrumReport {
    bundle::FluxConstants constants;
    double energy_max = 0.0;
    std::size_t n_theta = 0;
    std::vector<SpectralLine> lines;  // merged, ascending
    long kernel_dim = 0;
    std::vector<MergeCollision> collisions;
    std::vector<KDiagnostics> per_k;
};

struct AssembleOptions {
    d2::Spectrum2DOptions two_d;
    double merge_tol = 1e-6;  // relative, for branch-branch merging
};

// all k with |k + c| <= energy_max + 1/2
std::pair<long, long> k_window(double c, double energy_max);

SpectrumReport assemble_spectrum(const bundle::FieldProfile& g, double energy_max,
                                 std::size_t n_theta, const AssembleOptions& opts = {});

// closed form of Thm. zeromodes (requires c = 1/2), cross-checked against the
// assembled report by callers that hold one
long kernel_dimension_closed_form(const bundle::FluxConstants& fc);
long kernel_dimension(const bundle::FieldProfile& g, std::size_t n_theta = 512);

// chi^{+-} lift of a 2-D sector eigenvector; degenerate k + c = 0 rule applied
struct LiftedPair {
    std::vector<cplx> chi_plus, chi_minus;
    double e_plus = 0.0, e_minus = 0.0;
    double residual_plus = 0.0, residual_minus = 0.0;  // block-operator residuals
};
LiftedPair lift_eigenvectors(const d2::SectorOperator& op, const std::vector<cplx>& xi,
                             double lambda, long k, double c);

// || {Dt, sigma} - (2(k+c) I - sigma) || and || {D_N, sigma} || on the
// discrete sector space (max-abs entry norms; exact algebra at matrix level)
std::pair<double, double> block_identity_check(const d2::SectorOperator& op, long k, double c);

struct LowerBoundReport {
    long kernel_dim = 0;
    double flux_bound = 0.0;  // |(1/2pi) int beta_N(0)| = |m|
    bool holds = false;
    bool equality = false;
};
LowerBoundReport lower_bound_check(const bundle::FieldProfile& g, std::size_t n_theta = 512);

}  // namespace hopfdirac::s3

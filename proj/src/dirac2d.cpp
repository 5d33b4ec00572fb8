#include "hopfdirac/dirac2d.hpp"

#include <algorithm>
#include <cmath>

namespace hopfdirac::d2 {

namespace {

// Exact edge integral of the lower-row coefficient
//   beta(theta) = (2j+1)/sin(theta) - kappa(theta).
// The pole-singular parts integrate in closed form. Couplings built from
// exp(+-I/2) reproduce the regularity powers of both components exactly, so
// the chain never splits near the poles.
double beta_edge_integral(const bundle::GaugeData& gauge, long j, double t0, double t1) {
    const double twojp1 = 2.0 * static_cast<double>(j) + 1.0;
    return twojp1 * (std::log(std::tan(0.5 * t1)) - std::log(std::tan(0.5 * t0))) -
           gauge.kappa_integral(t0, t1);
}

}  // namespace

int SectorOperator::analytic_index(long j, long n) {
    if (n > 0 && j >= 0 && j < n) return +1;
    if (n < 0 && j >= n && j < 0) return -1;
    return 0;
}

SectorOperator reduce_axisymmetric(const bundle::GaugeData& gauge, long j,
                                   std::size_t n_theta, PoleBC bc) {
    if (n_theta < 16) throw GridTooCoarse("reduce_axisymmetric: N_theta < 16");
    const long n = gauge.chern();
    const double h = pi / static_cast<double>(n_theta);
    const int index = SectorOperator::analytic_index(j, n);

    // F on odd or even multiples of h/2; ties broken so the kernel component
    // gets the extra site.
    bool f_odd = true;
    if (bc == PoleBC::Power && index == -1) f_odd = false;

    // Surplus-node drop for index-0 sectors. The pole matters: the amputated
    // end leaves the minority component unanchored there, which admits a
    // spurious boundary layer if its singular branch decays into the domain.
    // For j >= max(n,0) the safe pole is the south one, for j <= min(n,0)-1
    // the north one; the killed amplitude is O(h^{3/2}) either way.
    bool drop_north = false, drop_south = false;
    if (bc == PoleBC::Dirichlet) {
        // index-blind fallback: square layout for every sector, dropping at
        // the pole where the majority component's regularity power is larger
        double north_exp = std::abs(static_cast<double>(f_odd ? j : j + 1)) + 0.5;
        double south_exp =
            std::abs(static_cast<double>(f_odd ? j - n + 1 : j - n)) + 0.5;
        (north_exp >= south_exp ? drop_north : drop_south) = true;
    } else if (index == 0) {
        if (j >= std::max(n, 0L))
            drop_south = true;
        else
            drop_north = true;
    }

    SectorOperator op;
    op.j_ = j;
    op.n_ = n;
    op.n_theta_ = n_theta;
    op.h_ = h;
    op.bc_ = bc;

    const std::size_t m_max = 2 * n_theta;  // sites 1 .. m_max-1
    std::size_t m_first = 1, m_last = m_max - 1;
    // majority component sits on odd m; drops shave one site off an end
    if (drop_north) m_first = 2;
    if (drop_south) m_last = m_max - 2;

    const std::size_t count = m_last - m_first + 1;
    op.theta_.resize(count);
    op.spin_.resize(count);
    op.off_.assign(count > 0 ? count - 1 : 0, cplx(0.0));
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t m = m_first + idx;
        op.theta_[idx] = 0.5 * h * static_cast<double>(m);
        bool odd = (m % 2) == 1;
        bool is_f = (odd == f_odd);
        op.spin_[idx] = is_f ? +1 : -1;
    }
    // multiplicative couplings on lattice edges: t = -i (2/h) exp(+- I/2)
    // with I the exact edge integral of the coefficient beta
    for (std::size_t idx = 0; idx + 1 < count; ++idx) {
        double I = beta_edge_integral(gauge, j, op.theta_[idx], op.theta_[idx + 1]);
        double sign = op.spin_[idx] > 0 ? +1.0 : -1.0;
        op.off_[idx] = -iunit * (2.0 / h) * std::exp(0.5 * sign * I);
    }
    return op;
}

std::vector<double> SectorOperator::eigenvalues() const {
    std::vector<double> diag(size(), 0.0);
    return lin::tridiag_eigenvalues(diag, off_);
}

std::pair<double, std::vector<cplx>> SectorOperator::eigenvector_near(double shift,
                                                                      Rng& rng) const {
    std::vector<double> diag(size(), 0.0);
    return lin::tridiag_eigenvector(diag, off_, shift, rng);
}

std::vector<cplx> SectorOperator::apply(std::span<const cplx> x) const {
    if (x.size() != size()) throw NumericError("SectorOperator::apply: size mismatch");
    std::vector<cplx> y(size(), cplx(0.0));
    for (std::size_t i = 0; i + 1 < size(); ++i) {
        y[i] += off_[i] * x[i + 1];
        y[i + 1] += std::conj(off_[i]) * x[i];
    }
    return y;
}

lin::HermitianMatrix SectorOperator::dense() const {
    lin::HermitianMatrix A(size());
    for (std::size_t i = 0; i + 1 < size(); ++i) A.at(i, i + 1) = off_[i];
    return A;
}

double SectorOperator::hermiticity_residual() const {
    // storage is the upper off-diagonal; the realized matrix is Hermitian by
    // construction, so the residual is the asymmetry of the dense image
    auto A = dense();
    double worst = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t k = i; k < std::min(size(), i + 2); ++k)
            worst = std::max(worst, std::abs(A.get(i, k) - std::conj(A.get(k, i))));
    return worst;
}

std::vector<cplx> SectorOperator::sample_radial(const std::function<double(double)>& v,
                                                int spin) const {
    std::vector<cplx> out(size(), cplx(0.0));
    for (std::size_t i = 0; i < size(); ++i) {
        if (spin_[i] != spin) continue;
        double th = theta_[i];
        out[i] = std::sqrt(std::tan(0.5 * th)) * v(bundle::chart_radius(th));
    }
    return out;
}

std::vector<double> solve_sector(const SectorOperator& op) { return op.eigenvalues(); }

namespace {

struct SectorResult {
    long j;
    std::vector<double> all;        // ascending, finest grid (extrapolated)
    long zero_count = 0;
    int zero_spin = 0;
    bool contributes = false;
};

SectorResult solve_one_sector(const bundle::GaugeData& gauge, long j, std::size_t n_theta,
                              double energy_max, const Spectrum2DOptions& opts) {
    SectorResult res;
    res.j = j;

    auto solve_at = [&](std::size_t nt) {
        return solve_sector(reduce_axisymmetric(gauge, j, nt, opts.pole_bc));
    };
    std::vector<double> evs = solve_at(n_theta);

    // zero/nonzero classification against the spectral gap
    double scale = 0.0;
    for (double v : evs) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1.0);
    double gap = 0.0;
    for (double v : evs) {
        double a = std::abs(v);
        if (a > 1e-6 * scale) {
            gap = (gap == 0.0) ? a : std::min(gap, a);
        }
    }
    if (gap == 0.0) gap = scale;
    const double ztol = opts.zero_tol * gap;
    std::vector<double> zeros, nonzeros;
    for (double v : evs) {
        double a = std::abs(v);
        if (a < ztol) {
            zeros.push_back(v);
        } else if (a < 10.0 * ztol) {
            throw AmbiguousZeroMode("spectrum_2d: eigenvalue " + std::to_string(v) +
                                    " in sector j=" + std::to_string(j) +
                                    " falls in the ambiguous zero band; refine the grid");
        } else {
            nonzeros.push_back(v);
        }
    }

    if (opts.richardson_levels >= 2) {
        // rank-paired two-grid extrapolation of the nonzero eigenvalues
        std::vector<double> fine = solve_at(2 * n_theta);
        std::vector<double> fine_nz;
        for (double v : fine)
            if (std::abs(v) >= ztol) fine_nz.push_back(v);
        std::vector<double> coarse_pos, coarse_neg, fine_pos, fine_neg;
        for (double v : nonzeros) (v > 0 ? coarse_pos : coarse_neg).push_back(v);
        for (double v : fine_nz) (v > 0 ? fine_pos : fine_neg).push_back(v);
        std::sort(coarse_pos.begin(), coarse_pos.end());
        std::sort(fine_pos.begin(), fine_pos.end());
        std::sort(coarse_neg.rbegin(), coarse_neg.rend());
        std::sort(fine_neg.rbegin(), fine_neg.rend());
        nonzeros.clear();
        std::size_t np = std::min(coarse_pos.size(), fine_pos.size());
        for (std::size_t i = 0; i < np; ++i)
            nonzeros.push_back((4.0 * fine_pos[i] - coarse_pos[i]) / 3.0);
        std::size_t nn = std::min(coarse_neg.size(), fine_neg.size());
        for (std::size_t i = 0; i < nn; ++i)
            nonzeros.push_back((4.0 * fine_neg[i] - coarse_neg[i]) / 3.0);
        std::sort(nonzeros.begin(), nonzeros.end());
    }

    res.zero_count = static_cast<long>(zeros.size());
    if (res.zero_count > 0) {
        // spin from the dominant component of each kernel vector
        SectorOperator op = reduce_axisymmetric(gauge, j, n_theta, opts.pole_bc);
        Rng rng(0x5eedULL + static_cast<std::uint64_t>(j * 7919 + 13));
        auto [mu, vec] = op.eigenvector_near(0.0, rng);
        (void)mu;
        double up = 0.0, dn = 0.0;
        for (std::size_t i = 0; i < vec.size(); ++i)
            (op.spin_signs()[i] > 0 ? up : dn) += std::norm(vec[i]);
        res.zero_spin = up >= dn ? +1 : -1;
        double minority = std::min(up, dn) / std::max(up, dn);
        if (minority > 0.1)
            throw AmbiguousZeroMode("spectrum_2d: zero mode in sector j=" +
                                    std::to_string(j) + " has no dominant spin component");
    }

    res.all.reserve(nonzeros.size() + zeros.size());
    res.all.assign(zeros.size(), 0.0);
    for (double v : nonzeros) res.all.push_back(v);
    std::sort(res.all.begin(), res.all.end());
    for (double v : res.all)
        if (std::abs(v) <= energy_max) res.contributes = true;
    return res;
}

}  // namespace

std::vector<EigenvalueLine> Spectrum2D::positive_lines() const {
    std::vector<EigenvalueLine> out;
    for (const auto& l : eigenvalues)
        if (l.value > 0.0) out.push_back(l);
    return out;
}

Spectrum2D spectrum_2d(const bundle::GaugeData& gauge, double energy_max,
                       std::size_t n_theta, const Spectrum2DOptions& opts) {
    if (!(energy_max > 0.0)) throw ValidationError("spectrum_2d: energy_max must be > 0");
    Spectrum2D spec;
    spec.n = gauge.chern();

    std::vector<SectorResult> kept;
    auto scan = [&](long start, long step) {
        int empties = 0;
        long j = start;
        long guard = 0;
        while (empties < 2 && guard++ < opts.max_sectors) {
            SectorResult r = solve_one_sector(gauge, j, n_theta, energy_max, opts);
            if (r.contributes) {
                empties = 0;
                kept.push_back(std::move(r));
            } else {
                ++empties;
            }
            j += step;
        }
    };
    scan(0, +1);
    scan(-1, -1);

    long zero_count = 0;
    int zero_spin = 0;
    std::vector<double> all;
    for (auto& r : kept) {
        std::vector<double> in_window;
        for (double v : r.all)
            if (std::abs(v) <= energy_max) in_window.push_back(v);
        spec.sector_table[r.j] = in_window;
        all.insert(all.end(), in_window.begin(), in_window.end());
        zero_count += r.zero_count;
        if (r.zero_count > 0) {
            if (zero_spin == 0) zero_spin = r.zero_spin;
            if (zero_spin != r.zero_spin)
                throw AmbiguousZeroMode("spectrum_2d: zero-mode spin not uniform");
        }
    }
    spec.zero_modes = {zero_count, zero_count > 0 ? zero_spin : 0};

    std::sort(all.begin(), all.end());
    for (double v : all) {
        if (!spec.eigenvalues.empty()) {
            auto& last = spec.eigenvalues.back();
            double tol = opts.merge_tol * std::max(1.0, std::abs(last.value));
            if (v - last.value <= tol) {
                ++last.multiplicity;
                continue;
            }
        }
        spec.eigenvalues.push_back({v, 1});
    }
    return spec;
}

}  // namespace hopfdirac::d2

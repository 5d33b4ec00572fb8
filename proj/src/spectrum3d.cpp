#include "hopfdirac/spectrum3d.hpp"

#include <algorithm>
#include <cmath>

namespace hopfdirac::s3 {

std::pair<long, long> k_window(double c, double energy_max) {
    if (!(energy_max >= 0.0)) throw ValidationError("k_window: energy_max must be >= 0");
    double bound = energy_max + 0.5;
    long kmin = static_cast<long>(std::ceil(-bound - c - 1e-12));
    long kmax = static_cast<long>(std::floor(bound - c + 1e-12));
    return {kmin, kmax};
}

namespace {

struct RawLine {
    double value;
    long multiplicity;
    bool is_sk;
    long k;
    double lambda;
    int branch;
    int spin;
};

int sgn(long x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

SpectrumReport assemble_spectrum(const bundle::FieldProfile& g, double energy_max,
                                 std::size_t n_theta, const AssembleOptions& opts) {
    if (!(energy_max > 0.0)) throw ValidationError("assemble_spectrum: energy_max must be > 0");
    SpectrumReport rep;
    rep.constants = bundle::flux_and_constants(g);
    rep.energy_max = energy_max;
    rep.n_theta = n_theta;
    const double c = rep.constants.c;
    const long m = rep.constants.m;
    auto [kmin, kmax] = k_window(c, energy_max);

    const std::size_t nk = static_cast<std::size_t>(kmax - kmin + 1);
    std::vector<std::vector<RawLine>> per_k_lines(nk);
    std::vector<KDiagnostics> per_k_diag(nk);

    parallel_for(nk, [&](std::size_t ik) {
        long k = kmin + static_cast<long>(ik);
        double kc = static_cast<double>(k) + c;
        long n = m - k;
        KDiagnostics diag;
        diag.k = k;
        diag.chern = n;
        double win2 = (energy_max + 0.5) * (energy_max + 0.5) - kc * kc;
        // slack so boundary-grazing eigenvalues survive discretization error
        double lambda_window = win2 > 0.0 ? std::sqrt(win2) * (1.0 + 1e-6) + 1e-6 : 0.0;
        diag.lambda_window = lambda_window;

        std::vector<RawLine>& lines = per_k_lines[ik];
        // S_k line straight from the theorem (empty when m = k)
        const double win_slack = energy_max * (1.0 + 1e-4) + 1e-9;
        if (n != 0) {
            double value = sgn(n) * kc - 0.5;
            if (std::abs(value) <= win_slack)
                lines.push_back({value, std::labs(n), true, k, 0.0, 0, sgn(n)});
        }
        if (lambda_window > 1e-9) {
            auto fc_k = bundle::flux_and_constants(g);
            auto gN = bundle::reduced_flux_density(g, k, fc_k);
            auto gauge = bundle::build_gauge(gN, n);
            auto spec2 = d2::spectrum_2d(gauge, lambda_window, n_theta, opts.two_d);
            diag.sectors_solved = static_cast<long>(spec2.sector_table.size());
            diag.zero_modes = spec2.zero_modes.count;
            for (const auto& l : spec2.positive_lines()) {
                double root = std::sqrt(l.value * l.value + kc * kc);
                for (int b : {+1, -1}) {
                    double e = b * root - 0.5;
                    // keep boundary grazers: discrete eigenvalues may exceed
                    // the exact window by their own discretization error
                    if (std::abs(e) <= win_slack)
                        lines.push_back({e, l.multiplicity, false, k, l.value, b, 0});
                }
            }
        }
        per_k_diag[ik] = diag;
    });

    rep.per_k.assign(per_k_diag.begin(), per_k_diag.end());

    // deterministic merge: S-lines coincide exactly; branch lines merge within
    // tolerance; S and branch never merge silently
    std::vector<RawLine> sk, br;
    for (auto& v : per_k_lines)
        for (auto& l : v) (l.is_sk ? sk : br).push_back(l);
    auto by_value = [](const RawLine& a, const RawLine& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.k != b.k) return a.k < b.k;
        return a.branch < b.branch;
    };
    std::sort(sk.begin(), sk.end(), by_value);
    std::sort(br.begin(), br.end(), by_value);

    std::vector<SpectralLine> merged;
    for (const auto& l : sk) {
        if (!merged.empty() && merged.back().is_sk &&
            std::abs(l.value - merged.back().value) <= 1e-14) {
            merged.back().multiplicity += l.multiplicity;
        } else {
            merged.push_back({l.value, l.multiplicity, true, l.k, 0.0, 0, l.spin});
        }
    }
    std::vector<SpectralLine> merged_br;
    double anchor = 0.0;
    for (const auto& l : br) {
        double tol = opts.merge_tol * std::max(1.0, std::abs(l.value));
        if (!merged_br.empty() && l.value - anchor <= tol) {
            merged_br.back().multiplicity += l.multiplicity;
        } else {
            if (!merged_br.empty() && l.value - anchor <= 10.0 * tol)
                rep.collisions.push_back({anchor, l.value,
                                          "branch lines near but outside merge tolerance"});
            merged_br.push_back({l.value, l.multiplicity, false, l.k, l.lambda, l.branch, 0});
            anchor = l.value;
        }
    }
    // cross-type proximity diagnostics
    for (const auto& s : merged)
        for (const auto& b : merged_br) {
            double tol = opts.merge_tol * std::max(1.0, std::abs(s.value));
            if (std::abs(s.value - b.value) <= 10.0 * tol)
                rep.collisions.push_back(
                    {s.value, b.value, "S_k line coincides with a branch line within band"});
        }

    merged.insert(merged.end(), merged_br.begin(), merged_br.end());
    std::sort(merged.begin(), merged.end(),
              [](const SpectralLine& a, const SpectralLine& b) { return a.value < b.value; });
    rep.lines = std::move(merged);

    for (const auto& l : rep.lines)
        if (std::abs(l.value) <= 1e-9) rep.kernel_dim += l.multiplicity;
    return rep;
}

long kernel_dimension_closed_form(const bundle::FluxConstants& fc) {
    if (std::abs(fc.c - 0.5) > 1e-9)
        throw HypothesisViolation("kernel_dimension: closed form requires c = 1/2");
    if (fc.m > 0) return fc.m;
    if (fc.m < -1) return -fc.m - 1;
    return 0;
}

long kernel_dimension(const bundle::FieldProfile& g, std::size_t n_theta) {
    auto fc = bundle::flux_and_constants(g);
    auto rep = assemble_spectrum(g, 0.55, n_theta);
    if (std::abs(fc.c - 0.5) <= 1e-9) {
        long closed = kernel_dimension_closed_form(fc);
        if (closed != rep.kernel_dim)
            throw NumericError("kernel_dimension: assembled spectrum disagrees with the "
                               "closed form (" +
                               std::to_string(rep.kernel_dim) + " vs " +
                               std::to_string(closed) + ")");
        return closed;
    }
    return rep.kernel_dim;
}

LiftedPair lift_eigenvectors(const d2::SectorOperator& op, const std::vector<cplx>& xi,
                             double lambda, long k, double c) {
    if (!(lambda > 0.0)) throw ValidationError("lift_eigenvectors: lambda must be > 0");
    const double kc = static_cast<double>(k) + c;
    const auto& spin = op.spin_signs();
    const std::size_t n = xi.size();
    if (n != op.size()) throw NumericError("lift_eigenvectors: size mismatch");

    LiftedPair out;
    double root = std::sqrt(lambda * lambda + kc * kc);
    out.e_plus = root - 0.5;
    out.e_minus = -root - 0.5;

    auto sigma_xi = xi;
    for (std::size_t i = 0; i < n; ++i) sigma_xi[i] *= static_cast<double>(spin[i]);

    out.chi_plus.resize(n);
    out.chi_minus.resize(n);
    if (std::abs(kc) < 1e-14) {
        out.chi_plus = xi;        // degenerate rule
        out.chi_minus = sigma_xi;
    } else {
        double fp = (-lambda + root) / kc;
        double fm = (-lambda - root) / kc;
        for (std::size_t i = 0; i < n; ++i) {
            out.chi_plus[i] = xi[i] + fp * sigma_xi[i];
            out.chi_minus[i] = xi[i] + fm * sigma_xi[i];
        }
    }

    auto block_residual = [&](const std::vector<cplx>& chi, double e) {
        auto y = op.apply(chi);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx bi = y[i] + (-0.5 + kc * static_cast<double>(spin[i])) * chi[i];
            num += std::norm(bi - e * chi[i]);
            den += std::norm(chi[i]);
        }
        return den > 0.0 ? std::sqrt(num / den) : 0.0;
    };
    out.residual_plus = block_residual(out.chi_plus, out.e_plus);
    out.residual_minus = block_residual(out.chi_minus, out.e_minus);
    return out;
}

std::pair<double, double> block_identity_check(const d2::SectorOperator& op, long k,
                                               double c) {
    const double kc = static_cast<double>(k) + c;
    const auto& spin = op.spin_signs();
    const auto& off = op.off_diagonal();
    double res_tilde = 0.0, res_plain = 0.0;
    // off-diagonal entries of {H, sigma}: t_i (sigma_i + sigma_{i+1})
    for (std::size_t i = 0; i + 1 < op.size(); ++i) {
        double s = static_cast<double>(spin[i] + spin[i + 1]);
        double v = std::abs(off[i] * s);
        res_plain = std::max(res_plain, v);
        res_tilde = std::max(res_tilde, v);
    }
    // diagonal of {Dt, sigma} - (2(k+c) I - sigma)
    for (std::size_t i = 0; i < op.size(); ++i) {
        double si = static_cast<double>(spin[i]);
        double diag = 2.0 * si * (-0.5 + kc * si) - (2.0 * kc - si);
        res_tilde = std::max(res_tilde, std::abs(diag));
    }
    return {res_tilde, res_plain};
}

LowerBoundReport lower_bound_check(const bundle::FieldProfile& g, std::size_t n_theta) {
    auto fc = bundle::flux_and_constants(g);
    auto rep = assemble_spectrum(g, 0.55, n_theta);
    LowerBoundReport out;
    out.kernel_dim = rep.kernel_dim;
    // the kernel-carrying block: k* = 0 when m > 0, k* = -1 when m < -1
    long bound = 0;
    if (std::abs(fc.c - 0.5) <= 1e-9) {
        if (fc.m > 0) bound = fc.m;
        else if (fc.m < -1) bound = -fc.m - 1;
    } else {
        // generic c: the bound from each k whose S_k line sits at zero
        for (const auto& l : rep.lines)
            if (l.is_sk && std::abs(l.value) <= 1e-9)
                bound = std::max(bound, l.multiplicity);
    }
    out.flux_bound = static_cast<double>(bound);
    out.holds = out.kernel_dim >= bound;
    out.equality = out.kernel_dim == bound;
    return out;
}

}  // namespace hopfdirac::s3

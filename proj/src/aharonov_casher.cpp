#include "hopfdirac/aharonov_casher.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace hopfdirac::ac {

namespace {

// log |v(r)| for the carrying component; p = monomial power, sgn = -1 for the
// e^{-h/4} weight (n > 0) and +1 for e^{+h/4} (n < 0)
double log_radial(const bundle::GaugeData& g, double p, double sgn, double r) {
    return p * std::log(r) + 0.25 * sgn * g.h(r);
}

}  // namespace

ZeroModeBasis build_zero_modes(const bundle::GaugeData& gauge, const ZeroModeGridSpec& grid) {
    ZeroModeBasis basis;
    basis.n = gauge.chern();
    basis.h_source = &gauge;
    if (basis.n == 0) return basis;  // documented sentinel, not an error

    const long absn = std::labs(basis.n);
    basis.spin = basis.n > 0 ? +1 : -1;
    auto shared_gauge = std::make_shared<bundle::GaugeData>(gauge);

    for (long ell = 0; ell < absn; ++ell) {
        ZeroMode m;
        m.ell = ell;
        m.spin = basis.spin;
        double p, sgn;
        if (basis.n > 0) {
            m.j = basis.n - 1 - ell;  // f_+(w) ~ w^(n-1-ell)
            p = static_cast<double>(m.j);
            sgn = -1.0;
        } else {
            m.j = -ell - 1;  // lower component, antiholomorphic degree ell
            p = static_cast<double>(ell);
            sgn = +1.0;
        }
        // normalize the profile peak to 1 to keep exponentials tame
        double logmax = -1e300;
        for (double r : gauge.r_grid())
            logmax = std::max(logmax, log_radial(gauge, p, sgn, std::max(r, 1e-12)));
        if (gauge.r_grid().size() < 8) {
            for (int i = 0; i <= 200; ++i) {
                double r = std::exp(std::log(1e-4) + (std::log(1e4) - std::log(1e-4)) * i / 200.0);
                logmax = std::max(logmax, log_radial(gauge, p, sgn, r));
            }
        }
        m.radial_plus = [shared_gauge, p, sgn, logmax](double r) {
            if (r <= 0.0) return p == 0.0 ? std::exp(log_radial(*shared_gauge, 0.0, sgn, 1e-12) - logmax) : 0.0;
            return std::exp(log_radial(*shared_gauge, p, sgn, r) - logmax);
        };
        basis.modes.push_back(std::move(m));
    }

    // sampled two-chart grids (sections, conformal weight applied)
    for (const auto& m : basis.modes) {
        bundle::ChartSpinorField f;
        f.chern = basis.n;
        f.r.resize(grid.n_r);
        double x0 = std::log(grid.r_min);
        double dx = (std::log(grid.r_max) - x0) / static_cast<double>(grid.n_r - 1);
        for (std::size_t i = 0; i < grid.n_r; ++i) f.r[i] = std::exp(x0 + dx * i);
        f.phi.resize(grid.n_phi);
        for (std::size_t i = 0; i < grid.n_phi; ++i)
            f.phi[i] = 2.0 * pi * static_cast<double>(i) / static_cast<double>(grid.n_phi);

        const std::size_t comp = m.spin > 0 ? 0 : 1;
        const long ang = m.spin > 0 ? m.j : m.j + 1;  // carrying-component angular index
        f.plus_grid.assign(grid.n_r * grid.n_phi * 2, cplx(0.0));
        f.minus_grid.assign(grid.n_r * grid.n_phi * 2, cplx(0.0));
        auto section_plus = [&](cplx z) {
            double r = std::abs(z);
            double u = m.radial_plus(r) / std::sqrt(bundle::omega_N(r));
            return u * std::polar(1.0, static_cast<double>(ang) * std::arg(z));
        };
        for (std::size_t ir = 0; ir < grid.n_r; ++ir)
            for (std::size_t ip = 0; ip < grid.n_phi; ++ip) {
                cplx zm = std::polar(f.r[ir], f.phi[ip]);
                cplx zp = -4.0 / zm;
                f.plus_grid[(ir * grid.n_phi + ip) * 2 + comp] =
                    section_plus(std::polar(f.r[ir], f.phi[ip]));
                // minus chart via the exact transition at z_+ = -4 / z_-
                cplx U = bundle::transition_U(basis.n, zp);
                auto W = bundle::transition_W_diag(zp);
                f.minus_grid[(ir * grid.n_phi + ip) * 2 + comp] =
                    U * W[comp] * section_plus(zp);
            }
        basis.fields.push_back(std::move(f));
    }

    // Gram of unit-normalized sections: <u_a, u_b> over N; distinct sectors
    // are orthogonal by the angular integral, computed here numerically
    const std::size_t nm = basis.modes.size();
    basis.gram.assign(nm * nm, 0.0);
    const auto& rg = gauge.r_grid();
    std::vector<double> rq;
    if (rg.size() >= 64) {
        rq = rg;
    } else {
        rq.resize(2048);
        for (std::size_t i = 0; i < rq.size(); ++i)
            rq[i] = std::exp(std::log(1e-6) + (std::log(1e6) - std::log(1e-6)) * i / 2047.0);
    }
    auto radial_inner = [&](const ZeroMode& a, const ZeroMode& b) {
        // 2 pi int v_a v_b Omega r dr (sections carry Omega^{-1/2} each)
        std::vector<double> f(rq.size());
        for (std::size_t i = 0; i < rq.size(); ++i) {
            double r = rq[i];
            f[i] = 2.0 * pi * a.radial_plus(r) * b.radial_plus(r) * bundle::omega_N(r) * r;
        }
        return lin::simpson_log(rq, f).first;
    };
    std::vector<double> norms(nm);
    for (std::size_t a = 0; a < nm; ++a)
        norms[a] = std::sqrt(radial_inner(basis.modes[a], basis.modes[a]));
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b) {
            if (basis.modes[a].j != basis.modes[b].j) continue;  // angular orthogonality
            basis.gram[a * nm + b] =
                radial_inner(basis.modes[a], basis.modes[b]) / (norms[a] * norms[b]);
        }
    if (nm > 0) {
        lin::HermitianMatrix G(nm);
        for (std::size_t a = 0; a < nm; ++a)
            for (std::size_t b = a; b < nm; ++b) G.at(a, b) = basis.gram[a * nm + b];
        auto dec = lin::eigh(G, false);
        double lo = dec.eigenvalues.front(), hi = dec.eigenvalues.back();
        basis.gram_condition = lo > 0.0 ? hi / lo : 1e300;
    }
    return basis;
}

double residual_check(const ZeroModeBasis& basis, std::size_t n_grid) {
    if (basis.modes.empty()) return 0.0;
    const auto& gauge = *basis.h_source;
    double worst = 0.0;
    for (const auto& m : basis.modes) {
        auto op = d2::reduce_axisymmetric(gauge, m.j, n_grid);
        auto x = op.sample_radial(m.radial_plus, m.spin);
        auto y = op.apply(x);
        double nx = 0.0, ny = 0.0;
        for (auto& c : x) nx += std::norm(c);
        for (auto& c : y) ny += std::norm(c);
        if (nx == 0.0) throw NumericError("residual_check: mode sampled to zero");
        worst = std::max(worst, std::sqrt(ny / nx));
    }
    return worst;
}

double subspace_angle_vs_solver(const ZeroModeBasis& basis, std::size_t n_theta,
                                d2::PoleBC bc) {
    if (basis.modes.empty()) return 0.0;
    const auto& gauge = *basis.h_source;
    double worst = 0.0;
    for (const auto& m : basis.modes) {
        auto op = d2::reduce_axisymmetric(gauge, m.j, n_theta, bc);
        Rng rng(0xace5ULL + static_cast<std::uint64_t>(m.ell));
        auto [mu, kernel] = op.eigenvector_near(0.0, rng);
        (void)mu;
        auto x = op.sample_radial(m.radial_plus, m.spin);
        cplx dotp = 0.0;
        double nx = 0.0, nk = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            dotp += std::conj(kernel[i]) * x[i];
            nx += std::norm(x[i]);
            nk += std::norm(kernel[i]);
        }
        double cosang = std::abs(dotp) / std::sqrt(nx * nk);
        worst = std::max(worst, std::acos(std::min(1.0, cosang)));
    }
    return worst;
}

}  // namespace hopfdirac::ac

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "hopfdirac/aharonov_casher.hpp"
#include "hopfdirac/cli_reports.hpp"
#include "hopfdirac/oracles.hpp"
#include "hopfdirac/spectrum3d.hpp"
#include "hopfdirac/transfer_r3.hpp"

using namespace hopfdirac;
using bundle::FieldProfile;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int idx, const char* name, bool pass, const std::string& detail, double secs,
            double budget) {
    bool in_budget = secs <= budget;
    if (!pass || !in_budget) ++failures;
    std::printf("CRITERION %d [%s]: %s (%s; %.1f s%s)\n", idx, name,
                pass && in_budget ? "PASS" : "FAIL", detail.c_str(), secs,
                in_budget ? "" : ", over budget");
    std::fflush(stdout);
}

long mult_near(const s3::SpectrumReport& rep, double value, double band) {
    long m = 0;
    for (const auto& l : rep.lines)
        if (std::abs(l.value - value) <= band) m += l.multiplicity;
    return m;
}

FieldProfile ring_perturbed(long n, double amp) {
    // 2n + amp cos(theta): the odd part integrates to zero against sin(theta)
    std::vector<double> th, val;
    for (int i = 0; i <= 192; ++i) {
        double t = pi * i / 192.0;
        th.push_back(t);
        val.push_back(2.0 * static_cast<double>(n) + amp * std::cos(t));
    }
    auto raw = FieldProfile::sampled(th, val);
    return raw.with_offset(2.0 * (static_cast<double>(n) - raw.total_flux()));
}

}  // namespace

int main() {
    // 1. kernel dimensions of prescribed size, 0-line carried by S_0 exactly
    {
        Timer t;
        bool pass = true;
        std::string detail;
        long expect = 1;
        for (double g0 : {3.0, 5.0, 7.0}) {
            auto rep = s3::assemble_spectrum(FieldProfile::constant(g0), 0.55, 2048);
            bool s0_exact = false;
            for (const auto& l : rep.lines)
                if (l.is_sk && l.k == 0 && l.value == 0.0 && l.multiplicity == expect)
                    s0_exact = true;
            pass = pass && rep.kernel_dim == expect && s0_exact;
            detail += "g=" + std::to_string((int)g0) + ":dim=" + std::to_string(rep.kernel_dim) +
                      (s0_exact ? "(S_0) " : "(!) ");
            ++expect;
        }
        report(1, "kernel dimensions m=1,2,3", pass, detail, t.seconds(), 3 * 60.0);
    }

    // 2. eigenvalue -1 multiplicity from S_{-1}; collisions flagged, not merged
    {
        Timer t;
        auto rep = s3::assemble_spectrum(FieldProfile::constant(3.0), 2.2, 1024);
        long sk_mult = 0;
        bool merged_foreign = false;
        for (const auto& l : rep.lines)
            if (std::abs(l.value + 1.0) <= 1e-12) {
                if (l.is_sk && l.k == -1) sk_mult += l.multiplicity;
                else merged_foreign = true;
            }
        bool pass = sk_mult >= 2 && !merged_foreign;
        report(2, "eigenvalue -1 carried by S_{-1}", pass,
               "S-mult=" + std::to_string(sk_mult) +
                   (merged_foreign ? ", foreign line at -1" : ", no silent merge"),
               t.seconds(), 120.0);
    }

    // 3. free-field round-sphere spectrum vs the exact-moment oracle
    {
        Timer t;
        s3::AssembleOptions opts;
        opts.two_d.richardson_levels = 2;  // one grid doubling
        auto rep = s3::assemble_spectrum(FieldProfile::constant(0.0), 4.5, 2048, opts);
        auto orc = oracle::s3_free_oracle(4);
        bool pass = true;
        std::string detail;
        for (long j = 0; j <= 2; ++j) {
            for (int s : {+1, -1}) {
                double target = s * (1.5 + static_cast<double>(j));
                long oracle_mult = 0;
                for (const auto& l : orc)
                    if (std::abs(l.value - target) <= 1e-9) oracle_mult += l.multiplicity;
                long got = mult_near(rep, target, 1e-4);
                double dev = 1.0;
                for (const auto& l : rep.lines)
                    if (std::abs(l.value - target) <= 1e-4)
                        dev = std::min(dev, std::abs(l.value - target));
                pass = pass && got == oracle_mult && dev <= 1e-4;
                if (s > 0)
                    detail += "+" + std::to_string(15 + 10 * j) + "/10:" + std::to_string(got) +
                              " ";
            }
        }
        report(3, "free field matches the S^3 oracle", pass, detail, t.seconds(), 5 * 60.0);
    }

    // 4. Aharonov-Casher counts and the explicit basis, uniform and perturbed
    {
        Timer t;
        bool pass = true;
        std::string detail;
        for (long n = -3; n <= 3; ++n) {
            for (int variant = 0; variant < 2; ++variant) {
                FieldProfile prof = variant == 0
                                        ? FieldProfile::constant(2.0 * n)
                                        : ring_perturbed(n, 0.8);
                auto gauge = bundle::build_gauge(prof, n);
                auto spec = d2::spectrum_2d(gauge, 3.5, 2048);
                bool count_ok = spec.zero_modes.count == std::labs(n);
                bool spin_ok = n == 0 || spec.zero_modes.spin == (n > 0 ? 1 : -1);
                bool angle_ok = true;
                if (n != 0) {
                    auto basis = ac::build_zero_modes(gauge);
                    angle_ok = ac::subspace_angle_vs_solver(basis, 2048) <= 1e-3;
                }
                pass = pass && count_ok && spin_ok && angle_ok;
                if (!count_ok || !spin_ok || !angle_ok)
                    detail += "n=" + std::to_string(n) + (variant ? "p" : "u") + "! ";
            }
        }
        if (detail.empty()) detail = "n in {-3..3}, uniform+perturbed, angles <= 1e-3";
        report(4, "Aharonov-Casher counts", pass, detail, t.seconds(), 10 * 60.0);
    }

    // 5. exact algebra: block identities and the connection table
    {
        Timer t;
        double worst_block = 0.0;
        for (double g0 : {0.0, 3.0, -5.0}) {
            auto fc = bundle::flux_and_constants(FieldProfile::constant(g0));
            auto [kmin, kmax] = s3::k_window(fc.c, 2.0);
            for (long k = kmin; k <= kmax; ++k) {
                auto gN = bundle::reduced_flux_density(FieldProfile::constant(g0), k, fc);
                auto gauge = bundle::build_gauge(gN, fc.m - k);
                for (long j : {-1L, 0L, 2L}) {
                    auto op = d2::reduce_axisymmetric(gauge, j, 256);
                    auto [tr, pr] = s3::block_identity_check(op, k, fc.c);
                    worst_block = std::max(worst_block, std::max(tr, pr));
                }
            }
        }
        auto pts = geo::sample_points(1000, 0x48504653ull);
        double worst_geo = geo::verify_dnu_identity(pts);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto f = geo::frame_at(pts[i]);
            auto d = geo::embedded_covariant_derivative(geo::FrameField::U1, geo::FrameField::U2,
                                                        pts[i]);
            worst_geo = std::max(worst_geo, std::sqrt(std::norm(d[0] - f.n[0]) +
                                                      std::norm(d[1] - f.n[1])));
        }
        bool pass = worst_block <= 1e-12 && worst_geo <= 1e-13;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "block %.1e, geometry %.1e", worst_block, worst_geo);
        report(5, "exact matrix and frame algebra", pass, buf, t.seconds(), 60.0);
    }

    // 6. flux quantization for every constructed gauge
    {
        Timer t;
        double worst = 0.0;
        for (long n = -3; n <= 3; ++n) {
            auto g = bundle::build_gauge(FieldProfile::constant(2.0 * n), n);
            worst = std::max(worst, std::abs(bundle::chart_flux_check(g) - 2.0 * pi * n));
            if (n != 0) {
                auto p = bundle::build_gauge(ring_perturbed(n, 0.8), n);
                worst = std::max(worst, std::abs(bundle::chart_flux_check(p) - 2.0 * pi * n));
            }
        }
        worst = std::max(worst, std::abs(bundle::chart_flux_check(bundle::ring_gauge(-3, 0.5)) +
                                         6.0 * pi));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "max |contour - 2 pi n| = %.2e", worst);
        report(6, "flux quantization", worst <= 1e-8, buf, t.seconds(), 60.0);
    }

    // 7. index lower bound with equality on the Hopf test set
    {
        Timer t;
        bool pass = true;
        std::string detail;
        for (double g0 : {0.0, 3.0, 5.0, 7.0, -5.0}) {
            auto rep = s3::lower_bound_check(FieldProfile::constant(g0), 1024);
            pass = pass && rep.holds && rep.equality;
            detail += std::to_string((int)g0) + ":" + std::to_string(rep.kernel_dim) + ">=" +
                      std::to_string((long)rep.flux_bound) + " ";
        }
        report(7, "kernel lower bound with equality", pass, detail, t.seconds(), 300.0);
    }

    // 8. Loss-Yau mode profile, norm stability, flat Dirac residual
    {
        Timer t;
        auto elems = r3::kernel_elements(FieldProfile::constant(3.0), 2048);
        bool pass = elems.size() == 1;
        std::string detail;
        if (pass) {
            auto mode = r3::transfer_mode(elems[0]);
            r3::R3GridSpec grid;  // defaults: 129 x 24 x 24 up to r = 1e2
            double dev = r3::profile_deviation(mode, grid);
            double res = r3::r3_dirac_residual(mode, grid, 1e-2);
            r3::R3GridSpec g1000 = grid;
            g1000.r_max = 1e3;
            g1000.n_r = 145;
            auto s100 = r3::transfer_zero_mode(mode, grid);
            auto s1000 = r3::transfer_zero_mode(mode, g1000);
            double drift =
                std::abs(s1000.norm_corrected - s100.norm_corrected) / s100.norm_corrected;
            pass = dev <= 1e-3 && res <= 1e-4 && drift <= 1e-3;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "profile %.1e, residual %.1e, norm drift %.1e", dev,
                          res, drift);
            detail = buf;
        } else {
            detail = "kernel element count != 1";
        }
        report(8, "Loss-Yau transferred mode", pass, detail, t.seconds(), 2 * 60.0);
    }

    std::printf("%s\n", failures == 0 ? "ACCEPTANCE: ALL CRITERIA PASS"
                                      : "ACCEPTANCE: FAILURES PRESENT");
    return failures == 0 ? 0 : 1;
}

#pragma once

#include <iosfwd>
#include <string>

#include "hopfdirac/spectrum3d.hpp"
#include "hopfdirac/transfer_r3.hpp"

namespace hopfdirac::cli {

enum class Command { Spectrum, ZeroModes, Transfer, Verify };
enum class OutputFormat { Csv, Json };

struct RunConfig {
    Command command = Command::Spectrum;
    // [field]
    bundle::FieldProfile field = bundle::FieldProfile::constant(3.0);
    std::string field_kind = "constant";
    double g0 = 3.0;
    std::string table_path;
    // [discretization]
    std::size_t n_theta = 2048;
    int doublings = 2;  // grid levels used for the convergence diagnostic
    std::string pole_bc = "power";
    // [window]
    double energy_max = 5.0;
    // [output]
    OutputFormat format = OutputFormat::Csv;
    std::string path = "out.csv";
    // [run]
    std::uint64_t seed = 12345;
};

// INI-like text -> validated config; unknown keys rejected, errors carry
// line numbers. `override_kv` entries look like "window.energy_max=2.5".
RunConfig parse_config(const std::string& text,
                       const std::vector<std::string>& override_kv = {});

std::string format_spectrum_csv(const s3::SpectrumReport& rep);
std::string format_spectrum_json(const s3::SpectrumReport& rep, const RunConfig& cfg);
// inverse of format_spectrum_json for the line data (round-trip checks)
s3::SpectrumReport parse_spectrum_json(const std::string& text);

void emit_spectrum(const s3::SpectrumReport& rep, const RunConfig& cfg);

struct VerifyCheck {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};
// runs the invariant suite and prints one line per check to `out`
std::vector<VerifyCheck> run_verification(const RunConfig& cfg, std::ostream& out);

// command dispatchers; return process exit codes (0 ok, 2 config, 3 numeric,
// 4 io)
int run_command(const RunConfig& cfg, std::ostream& out);

}  // namespace hopfdirac::cli

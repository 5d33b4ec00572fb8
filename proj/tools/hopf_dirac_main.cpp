#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hopfdirac/cli_reports.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectra and zero modes of Hopf-aligned magnetic Dirac operators"};
    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "INI-like run configuration")->required();
    app.add_option("--override", overrides, "override entries, e.g. window.energy_max=2.5");
    CLI11_PARSE(app, argc, argv);

    using namespace hopfdirac;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read config: " << config_path << "\n";
            return 4;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        cli::RunConfig cfg = cli::parse_config(buf.str(), overrides);
        return cli::run_command(cfg, std::cout);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

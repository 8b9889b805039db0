#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tdgasci/errors.hpp"
#include "tdgasci/pipeline.hpp"
#include "tdgasci/scenario.hpp"

namespace {

std::optional<std::string> cache_dir_from_env() {
    if (const char* v = std::getenv("TDGASCI_CACHE_DIR"); v && *v) return std::string(v);
    return std::nullopt;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-dependent GAS-CI for one-dimensional soft-Coulomb atoms and molecules"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string output_override;
    int threads = -1;
    bool quiet = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output_override, "Override the output directory");
        sub->add_option("-t,--threads", threads, "Thread count (0: all cores)");
        sub->add_flag("-q,--quiet", quiet, "Suppress progress messages");
    };

    auto* ground = app.add_subcommand("ground", "Ground state: HF, orbitals, integrals, GAS, CI, ITP");
    add_common(ground);

    std::string resume;
    auto* propagate = app.add_subcommand("propagate", "Real-time propagation from the CI ground state");
    add_common(propagate);
    propagate->add_option("--resume", resume, "Resume from a checkpoint file");

    std::vector<double> r_list;
    auto* scan = app.add_subcommand("scan-r", "Born-Oppenheimer scan over the internuclear distance");
    add_common(scan);
    scan->add_option("--R", r_list, "Internuclear distances (overrides [scan] R)");

    std::string series_path, spectrum_out = "dipole_spectrum.tsv";
    int padding = 4;
    auto* spectrum = app.add_subcommand("spectrum", "Dipole power spectrum from a time series TSV");
    spectrum->add_option("series", series_path, "Time series TSV with t and dipole columns")
        ->required()
        ->check(CLI::ExistingFile);
    spectrum->add_option("-o,--output", spectrum_out, "Output TSV");
    spectrum->add_option("--padding", padding, "Zero-padding factor")->check(CLI::PositiveNumber);

    auto* info = app.add_subcommand("info", "Print configuration count and memory estimates");
    add_common(info);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    const tdgasci::Log log = [&](const std::string& msg) {
        if (!quiet) std::cerr << msg << '\n';
    };

    try {
        if (spectrum->parsed()) {
            print(tdgasci::run_spectrum(series_path, padding, spectrum_out));
            return 0;
        }
        tdgasci::Scenario s = tdgasci::load_scenario(scenario_path);
        if (!output_override.empty()) s.output_dir = output_override;
        if (threads >= 0) s.threads = threads;
        const auto cache = cache_dir_from_env();
        if (ground->parsed()) {
            print(tdgasci::run_ground_state(s, log, cache));
        } else if (propagate->parsed()) {
            print(tdgasci::run_propagation(s, log, cache,
                                           resume.empty() ? std::nullopt : std::optional<std::string>(resume)));
        } else if (scan->parsed()) {
            const auto& rs = r_list.empty() ? s.scan_r : r_list;
            if (rs.empty()) throw tdgasci::ConfigError("scan-r: no R values given");
            print(tdgasci::run_r_scan(s, rs, log, cache));
        } else if (info->parsed()) {
            print(tdgasci::run_info(s));
        }
    } catch (const tdgasci::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const tdgasci::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return 3;
    } catch (const tdgasci::ResourceError& e) {
        std::cerr << "resource budget exceeded: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "tdgasci/ci.hpp"
#include "tdgasci/fedvr.hpp"
#include "tdgasci/gas.hpp"
#include "tdgasci/integrals.hpp"
#include "tdgasci/orbitals.hpp"
#include "tdgasci/propagate.hpp"
#include "tdgasci/scenario.hpp"
#include "tdgasci/scf.hpp"

namespace tdgasci {

using Log = std::function<void(const std::string&)>;

// Everything the field-free stages produce for one scenario.
struct GroundState {
    FedvrGrid grid;
    HfResult hf;
    RotationMatrix rotation;
    IntegralStore ints;
    DeterminantSpace space;
    SparseHamiltonian h;
    ItpResult itp;
    double nuclear_repulsion = 0.0;
};

FedvrGrid make_grid(const GridBlock& g);

// fedvr -> scf -> orbitals -> integrals -> gas -> ci -> itp. Stage failures are rethrown
// with the stage name and scenario hash prepended.
GroundState prepare_ground_state(const Scenario& s, const Log& log, std::optional<std::string> cache_dir = {});

// Natural orbitals from a central-only correlated ground state.
RotationMatrix natural_rotation(const FedvrGrid& grid, const PotentialSpec& potential, const HfResult& hf, int n_el,
                                const GasBlock& gas, const PropagatorConfig& config, const Log& log);

nlohmann::json run_ground_state(const Scenario& s, const Log& log, std::optional<std::string> cache_dir = {});
nlohmann::json run_propagation(const Scenario& s, const Log& log, std::optional<std::string> cache_dir = {},
                               std::optional<std::string> resume_checkpoint = {});
nlohmann::json run_r_scan(const Scenario& s, const std::vector<double>& r_list, const Log& log,
                          std::optional<std::string> cache_dir = {});
nlohmann::json run_info(const Scenario& s);
// Post-processes a dipole time series TSV (columns t and dipole) into S(omega).
nlohmann::json run_spectrum(const std::string& series_path, int zero_padding, const std::string& output_path);

void write_text(const std::string& path, const std::string& content);

}  // namespace tdgasci

#include "tdgasci/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tdgasci/errors.hpp"
#include "tdgasci/observables.hpp"

namespace tdgasci {

namespace {

using json = nlohmann::json;

template <class F>
auto stage(const std::string& name, const Scenario& s, const Log& log, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string prefix = "[" + s.hash_hex() + "] stage " + name + ": ";
    try {
        auto r = f();
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log) {
            std::ostringstream os;
            os << "stage " << name << " done in " << std::fixed << std::setprecision(2) << dt << " s";
            log(os.str());
        }
        return r;
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(prefix + e.what());
    } catch (const ResourceError& e) {
        throw ResourceError(prefix + e.what());
    }
}

void apply_threads(const Scenario& s) {
#ifdef _OPENMP
    if (s.threads > 0) omp_set_num_threads(s.threads);
#else
    (void)s;
#endif
}

IntegralOptions integral_options(const Scenario& s, const std::optional<std::string>& cache_dir) {
    IntegralOptions o;
    o.memory_budget_bytes = s.memory_budget_gb * 1e9;
    o.allow_direct = s.allow_direct;
    if (cache_dir) o.cache_dir = *cache_dir;
    return o;
}

std::string header(const Scenario& s, const std::string& what) {
    return "scenario=" + s.name + " hash=" + s.hash_hex() + " " + what;
}

double mean_spacing_beyond(const FedvrGrid& g, double r) {
    std::vector<double> x;
    for (double v : g.nodes())
        if (v > r) x.push_back(v);
    if (x.size() < 2) return (g.nodes().back() - g.nodes().front()) / std::max(1, g.n_b() - 1);
    return (x.back() - x.front()) / (x.size() - 1);
}

struct PropagationOutcome {
    TimeSeries series;
    cvec state;
};

}  // namespace

void write_text(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

FedvrGrid make_grid(const GridBlock& g) {
    if (!g.boundaries.empty()) return FedvrGrid::from_boundaries(g.boundaries, g.x_c, g.n_g);
    return FedvrGrid::uniform(g.x_s, g.x_c, g.elements, g.n_g);
}

RotationMatrix natural_rotation(const FedvrGrid& grid, const PotentialSpec& potential, const HfResult& hf, int n_el,
                                const GasBlock& gas, const PropagatorConfig& config, const Log& log) {
    const RotationMatrix hf_rot = build_hf_canonical(grid, hf);
    IntegralOptions o;
    o.central_only = true;
    const IntegralStore ints = IntegralStore::build(grid, potential, hf_rot, o);
    const DeterminantSpace space = DeterminantSpace::enumerate(gas.make(n_el, grid.n_c()), grid.n_c());
    AssembleOptions ao;
    ao.with_dipole = false;
    const SparseHamiltonian h = assemble(space, ints, ao);
    const ItpResult gs = itp_ground_state(h, config, lowest_diagonal_seed(h));
    if (log) {
        std::ostringstream os;
        os << std::setprecision(10) << "central ground state for natural orbitals: E = " << gs.energy
           << ", n_conf = " << space.size();
        log(os.str());
    }
    const Rdm r = rdm(space, gs.state);
    return build_natural(grid, central_dvr_density(r, hf_rot));
}

GroundState prepare_ground_state(const Scenario& s, const Log& log, std::optional<std::string> cache_dir) {
    apply_threads(s);
    GroundState g;
    g.grid = stage("fedvr", s, log, [&] { return make_grid(s.grid); });
    if (log)
        log("grid: N_b = " + std::to_string(g.grid.n_b()) + ", N_c = " + std::to_string(g.grid.n_c()));
    const bool needs_hf = s.orbitals.kind != OrbitalKind::none && s.orbitals.kind != OrbitalKind::identity;
    if (needs_hf)
        g.hf = stage("scf", s, log, [&] { return solve_hf(g.grid, s.potential, s.n_el, HfRegion::central); });
    g.rotation = stage("orbitals", s, log, [&] {
        switch (s.orbitals.kind) {
            case OrbitalKind::none: return unrotated(g.grid);
            case OrbitalKind::identity: return identity_rotation(g.grid);
            case OrbitalKind::hf_canonical: return build_hf_canonical(g.grid, g.hf);
            case OrbitalKind::p1: return build_p1(g.grid, s.potential, g.hf, s.orbitals.ortho);
            case OrbitalKind::p2:
                return build_p2(g.grid, s.potential, g.hf, hartree_potential_minus2(g.grid, s.potential, s.n_el),
                                s.orbitals.ortho);
            case OrbitalKind::natural:
                return natural_rotation(g.grid, s.potential, g.hf, s.n_el, s.orbitals.natural_gas, s.propagation, log);
        }
        throw ConfigError("unknown orbital kind");
    });
    g.ints = stage("integrals", s, log, [&] {
        IntegralStore ints = IntegralStore::build(g.grid, s.potential, g.rotation, integral_options(s, cache_dir));
        if (s.use_cap) ints.set_cap(g.grid, s.r_cap);
        return ints;
    });
    g.space = stage("gas", s, log, [&] {
        const GasSpec spec = s.gas.make(s.n_el, g.grid.n_b());
        return DeterminantSpace::enumerate(spec, g.grid.n_b(), static_cast<std::size_t>(s.max_determinants));
    });
    if (log) log("determinants: " + std::to_string(g.space.size()));
    g.h = stage("ci", s, log, [&] { return assemble(g.space, g.ints); });
    if (log) log("nonzeros: H0 " + std::to_string(g.h.h0.nnz()) + ", D " + std::to_string(g.h.dipole.nnz()));
    if (s.potential.kind == PotentialKind::diatomic) g.nuclear_repulsion = internuclear_repulsion(s.potential);
    g.h.nuclear_offset = g.nuclear_repulsion;
    g.itp = stage("itp", s, log, [&] { return itp_ground_state(g.h, s.propagation, lowest_diagonal_seed(g.h)); });
    if (log) {
        std::ostringstream os;
        os << std::setprecision(12) << "E0 = " << g.itp.energy << " after " << g.itp.steps << " ITP steps";
        log(os.str());
    }
    return g;
}

nlohmann::json run_ground_state(const Scenario& s, const Log& log, std::optional<std::string> cache_dir) {
    const GroundState g = prepare_ground_state(s, log, cache_dir);
    json r;
    r["scenario"] = s.name;
    r["scenario_hash"] = s.hash_hex();
    r["N_b"] = g.grid.n_b();
    r["N_c"] = g.grid.n_c();
    r["n_conf"] = g.space.size();
    r["gas"] = g.space.spec().describe();
    r["orbital_kind"] = to_string(g.rotation.kind);
    r["E0"] = g.itp.energy;
    r["E_total"] = g.itp.energy + g.nuclear_repulsion;
    r["nuclear_repulsion"] = g.nuclear_repulsion;
    r["itp_steps"] = g.itp.steps;
    if (g.hf.n_occ > 0) {
        r["E_hf_center"] = g.hf.energy;
        std::vector<double> eps(g.hf.orbital_energies.data(),
                                g.hf.orbital_energies.data() + std::min<Eigen::Index>(10, g.hf.orbital_energies.size()));
        r["hf_orbital_energies"] = eps;
    }
    std::vector<double> labels(g.rotation.labels.data(),
                               g.rotation.labels.data() + std::min<Eigen::Index>(10, g.rotation.labels.size()));
    r["orbital_labels"] = labels;
    write_text(s.output_dir + "/ground.json", r.dump(2) + "\n");
    if (g.rotation.n_central() > 0)
        write_text(s.output_dir + "/orbitals.tsv", "# " + header(s, "central orbitals") + "\n" +
                                                       g.rotation.orbital_table(g.grid, 8));
    return r;
}

nlohmann::json run_propagation(const Scenario& s, const Log& log, std::optional<std::string> cache_dir,
                               std::optional<std::string> resume_checkpoint) {
    if (!s.has_pulse) throw ConfigError("[" + s.hash_hex() + "] propagate: scenario has no [pulse] section");
    if (!(s.propagation.t_final > 0.0)) throw ConfigError("[" + s.hash_hex() + "] propagate: t_final must be positive");
    GroundState g = prepare_ground_state(s, log, cache_dir);
    json r;
    r["scenario"] = s.name;
    r["scenario_hash"] = s.hash_hex();
    r["n_conf"] = g.space.size();
    r["E0"] = g.itp.energy;

    auto propagate_once = [&](const PulseSpec& pulse, const std::string& tag) {
        cvec state = g.itp.state.cast<std::complex<double>>();
        double t_start = 0.0;
        PropagatorConfig pc = s.propagation;
        if (pc.checkpoint_stride > 0) pc.checkpoint_path = s.output_dir + "/checkpoint" + tag + ".bin";
        if (resume_checkpoint) {
            t_start = stage("resume", s, log, [&] { return load_checkpoint(*resume_checkpoint, state, g.h.space_hash); });
            if (log) log("resumed from checkpoint at t = " + std::to_string(t_start));
        }
        if (pc.checkpoint_stride > 0) std::filesystem::create_directories(s.output_dir);
        PropagationOutcome out;
        out.series = stage("propagate" + tag, s, log, [&] { return run(g.h, pulse, state, pc, s.use_cap, {}, t_start); });
        out.state = std::move(state);
        write_text(s.output_dir + "/series" + tag + ".tsv", out.series.to_tsv(header(s, "time series")));
        return out;
    };

    auto analyze = [&](const PropagationOutcome& out, const std::string& tag, json& j) {
        j["final_norm"] = out.state.squaredNorm();
        j["ionization_probability"] = ionization_probability(out.state);
        if (s.observables.r_ion > 0.0) {
            std::vector<char> mask(g.ints.n_orbitals(), 0);
            for (int a = g.ints.n_central(); a < g.ints.n_orbitals(); ++a)
                mask[a] = std::abs(g.ints.outer_node(a)) > s.observables.r_ion;
            const Rdm rr = rdm(g.space, out.state, mask);
            const double k_max = s.observables.k_max > 0.0 ? s.observables.k_max
                                                           : M_PI / mean_spacing_beyond(g.grid, s.observables.r_ion);
            const auto k = uniform_grid(-k_max, k_max, s.observables.k_points);
            const auto nk = momentum_density(rr, g.rotation, g.grid, s.observables.r_ion, k);
            const auto e = uniform_grid(0.0, s.observables.e_max, s.observables.e_points);
            const EnergySpectrum pe = photoelectron_energy_spectrum(k, nk, e);
            const PeakInfo peak = main_peak(pe.energy, pe.total, 0.05, s.observables.e_max);
            std::ostringstream os;
            os << "# " << header(s, "momentum density") << "\nk\tn_k\n" << std::setprecision(12);
            for (std::size_t i = 0; i < k.size(); ++i) os << k[i] << '\t' << nk[i] << '\n';
            write_text(s.output_dir + "/momentum" + tag + ".tsv", os.str());
            write_text(s.output_dir + "/photoelectron" + tag + ".tsv", pe.to_tsv(header(s, "photoelectron spectrum")));
            j["photoelectron_peak_energy"] = peak.position;
            j["photoelectron_peak_center"] = peak.center;
            j["photoelectron_peak_height"] = peak.height;
            j["outer_electrons"] = rr.trace();
        }
        if (s.observables.dipole_spectrum) {
            std::vector<double> t, x;
            for (const auto& smp : out.series.samples) {
                t.push_back(smp.t);
                x.push_back(smp.dipole);
            }
            const DipoleSpectrum sp = dipole_spectrum(t, x, s.observables.zero_padding);
            write_text(s.output_dir + "/dipole_spectrum" + tag + ".tsv", sp.to_tsv(header(s, "dipole spectrum")));
        }
        if (!s.observables.density_x.empty()) {
            const Rdm full = rdm(g.space, out.state);
            const auto n = spatial_density(full, g.rotation, g.grid, s.observables.density_x);
            std::ostringstream os;
            os << "# " << header(s, "final density") << "\nx\tn\n" << std::setprecision(12);
            for (std::size_t i = 0; i < n.size(); ++i) os << s.observables.density_x[i] << '\t' << n[i] << '\n';
            write_text(s.output_dir + "/density" + tag + ".tsv", os.str());
        }
    };

    if (s.scan_omega_points > 0) {
        std::ostringstream tsv;
        tsv << "# " << header(s, "yield vs omega") << "\nomega\tyield\n" << std::setprecision(12);
        json pts = json::array();
        for (int i = 0; i < s.scan_omega_points; ++i) {
            PulseSpec p = s.pulse;
            p.omega = s.scan_omega_points == 1
                          ? s.scan_omega_min
                          : s.scan_omega_min + (s.scan_omega_max - s.scan_omega_min) * i / (s.scan_omega_points - 1);
            cvec state = g.itp.state.cast<std::complex<double>>();
            run(g.h, p, state, s.propagation, s.use_cap, {}, 0.0);
            const double y = ionization_probability(state);
            tsv << p.omega << '\t' << y << '\n';
            pts.push_back({{"omega", p.omega}, {"yield", y}});
            if (log) log("omega = " + std::to_string(p.omega) + " yield = " + std::to_string(y));
        }
        write_text(s.output_dir + "/yield_vs_omega.tsv", tsv.str());
        r["yield_vs_omega"] = pts;
    } else if (s.observables.asymmetry) {
        PulseSpec plus = s.pulse;
        PulseSpec minus = s.pulse;
        minus.phi_cep += M_PI;
        const auto a = propagate_once(plus, "_plus");
        json jp;
        analyze(a, "_plus", jp);
        const auto b = propagate_once(minus, "_minus");
        json jm;
        analyze(b, "_minus", jm);
        r["plus"] = jp;
        r["minus"] = jm;
        r["eta"] = emission_asymmetry(jm["ionization_probability"].get<double>(), jp["ionization_probability"].get<double>());
    } else {
        const auto a = propagate_once(s.pulse, "");
        analyze(a, "", r);
    }
    write_text(s.output_dir + "/propagation.json", r.dump(2) + "\n");
    return r;
}

nlohmann::json run_r_scan(const Scenario& s, const std::vector<double>& r_list, const Log& log,
                          std::optional<std::string> cache_dir) {
    if (s.potential.kind != PotentialKind::diatomic) throw ConfigError("scan-r: requires a diatomic potential");
    json rows = json::array();
    std::ostringstream tsv;
    tsv << "# " << header(s, "R scan") << "\nR\tE_el\tE_t\tstatus\n" << std::setprecision(12);
    for (double R : r_list) {
        Scenario si = s;
        si.potential.R = R;
        json row;
        row["R"] = R;
        try {
            si.validate();
            const GroundState g = prepare_ground_state(si, log, cache_dir);
            row["E_el"] = g.itp.energy;
            row["E_t"] = g.itp.energy + g.nuclear_repulsion;
            row["status"] = "ok";
            tsv << R << '\t' << g.itp.energy << '\t' << g.itp.energy + g.nuclear_repulsion << "\tok\n";
        } catch (const std::exception& e) {
            row["status"] = "failed";
            row["error"] = e.what();
            tsv << R << "\tnan\tnan\tfailed\n";
            if (log) log(std::string("R = ") + std::to_string(R) + " failed: " + e.what());
        }
        rows.push_back(row);
    }
    // Plateau flag: the last successful points agree within 1 mHa.
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i]["status"] == "ok" && rows[i - 1]["status"] == "ok")
            rows[i]["plateau"] = std::abs(rows[i]["E_t"].get<double>() - rows[i - 1]["E_t"].get<double>()) < 1e-3;
    json r;
    r["scenario"] = s.name;
    r["scenario_hash"] = s.hash_hex();
    r["points"] = rows;
    write_text(s.output_dir + "/scan_r.tsv", tsv.str());
    write_text(s.output_dir + "/scan_r.json", r.dump(2) + "\n");
    return r;
}

nlohmann::json run_info(const Scenario& s) {
    const FedvrGrid grid = make_grid(s.grid);
    const GasSpec spec = s.gas.make(s.n_el, grid.n_b());
    const double n_conf = count_determinants(spec, grid.n_b());
    const int n_c = s.orbitals.kind == OrbitalKind::none ? 0 : grid.n_c();
    json r;
    r["scenario"] = s.name;
    r["scenario_hash"] = s.hash_hex();
    r["N_b"] = grid.n_b();
    r["N_c"] = grid.n_c();
    r["gas"] = spec.describe();
    r["n_conf"] = n_conf;
    r["integral_bytes"] = IntegralStore::estimate_bytes(n_c, grid.n_b() - n_c);
    r["state_vector_bytes"] = 16.0 * n_conf;
    r["memory_budget_bytes"] = s.memory_budget_gb * 1e9;
    return r;
}

nlohmann::json run_spectrum(const std::string& series_path, int zero_padding, const std::string& output_path) {
    std::ifstream in(series_path);
    if (!in) throw ConfigError("spectrum: cannot open " + series_path);
    std::string line, hash_line;
    std::vector<std::string> cols;
    std::vector<double> t, x;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            hash_line = line;
            continue;
        }
        std::istringstream is(line);
        if (cols.empty()) {
            std::string c;
            while (is >> c) cols.push_back(c);
            continue;
        }
        std::vector<double> v;
        double d;
        while (is >> d) v.push_back(d);
        std::size_t it = 0, ix = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c] == "t") it = c;
            if (cols[c] == "dipole") ix = c;
        }
        if (v.size() != cols.size()) throw ConfigError("spectrum: malformed row in " + series_path);
        t.push_back(v[it]);
        x.push_back(v[ix]);
    }
    const DipoleSpectrum sp = dipole_spectrum(t, x, zero_padding);
    const std::string comment = (hash_line.size() > 2 ? hash_line.substr(2) : std::string("series")) + " | dipole spectrum";
    write_text(output_path, sp.to_tsv(comment));
    json r;
    r["samples"] = t.size();
    r["output"] = output_path;
    const auto peaks = spectrum_peaks(sp, 0.05, sp.omega.back(), 1e-3);
    std::vector<double> pos;
    for (const auto& p : peaks) pos.push_back(p.position);
    r["peaks"] = pos;
    return r;
}

}  // namespace tdgasci

#include "cvsense/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <set>

#include "cvsense/allocation.hpp"
#include "cvsense/error.hpp"
#include "cvsense/fisher.hpp"
#include "cvsense/grid_search.hpp"
#include "cvsense/protocols.hpp"

namespace cvsense::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kMonteCarloSigma = 4.0;
constexpr double kBiasSigma = 5.0;
constexpr double kFisherGapTol = 1e-4;
constexpr double kVacuumFisherTol = 1e-6;
constexpr double kSqueezingWarnDb = 40.0;

// ----------------------------------------------------------------- param access

template <typename T>
T get(const json& p, const std::string& key) {
    const auto& v = p.at(key);
    if (v.is_null()) throw ConfigError("missing required parameter '" + key + "'");
    return v.get<T>();
}

bool has(const json& p, const std::string& key) { return p.contains(key) && !p.at(key).is_null(); }

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void check_sweep(int lo, int hi, int per_decade) {
    require(lo >= 1, "M_min must be >= 1");
    require(hi >= lo, "M_max must be >= M_min");
    require(per_decade >= 1, "points_per_decade must be >= 1");
}

void warn_squeezing(std::vector<std::string>& warnings, double max_photons) {
    if (max_photons > 0.0 && squeezing_db(max_photons) > kSqueezingWarnDb) {
        warnings.push_back("N_S up to " + format_real(max_photons) + " needs " +
                           format_real(std::round(10.0 * squeezing_db(max_photons)) / 10.0) +
                           " dB of squeezing; more than 40 dB is beyond experimental state of the art");
    }
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
    auto p = out;
    p.replace_filename(out.stem().string() + suffix + out.extension().string());
    return p;
}

std::string status(bool ok) { return ok ? "PASS" : "FAIL"; }

// ------------------------------------------------------------------- rms-curve

RunRecord run_rms_curve(const json& p, const fs::path& out) {
    RunRecord rec;
    const std::string scheme_text = get<std::string>(p, "scheme");
    std::vector<Scheme> schemes;
    if (scheme_text == "both") {
        schemes = {Scheme::entangled, Scheme::product};
    } else {
        schemes = {parse_scheme(scheme_text)};
    }
    const auto etas = get<std::vector<double>>(p, "eta");
    require(!etas.empty(), "eta list is empty");
    require(!(has(p, "n_S") && has(p, "N_S")), "give either n_S (per node) or N_S (total), not both");
    const bool per_node = !has(p, "N_S");
    const double photons = per_node ? (has(p, "n_S") ? get<double>(p, "n_S") : 1.0) : get<double>(p, "N_S");
    const int lo = get<int>(p, "M_min");
    const int hi = get<int>(p, "M_max");
    const int per_decade = get<int>(p, "points_per_decade");
    check_sweep(lo, hi, per_decade);
    const auto nodes = log_spaced_nodes(lo, hi, per_decade);

    CsvWriter csv(out, {"M", "delta_alpha", "scheme", "eta", "n_S"});
    double max_photons = 0.0;
    for (Scheme scheme : schemes) {
        for (double eta : etas) {
            for (int m : nodes) {
                const double total = per_node ? photons * m : photons;
                max_photons = std::max(max_photons, total);
                csv << m << rms_error(scheme, m, total, eta) << to_string(scheme) << eta << total / m;
                csv.end_row();
            }
        }
    }
    warn_squeezing(rec.warnings, max_photons);
    rec.outputs = {out};
    return rec;
}

// ----------------------------------------------------------------- ratio-curve

RunRecord run_ratio_curve(const json& p, const fs::path& out) {
    RunRecord rec;
    const std::string mode = get<std::string>(p, "mode");
    const double total = get<double>(p, "N_S");
    if (mode == "vs-M") {
        const auto etas = has(p, "eta") ? get<std::vector<double>>(p, "eta")
                                        : std::vector<double>{0.5, 0.8, 0.9, 0.95, 0.99, 1.0};
        const int lo = get<int>(p, "M_min");
        const int hi = get<int>(p, "M_max");
        const int per_decade = get<int>(p, "points_per_decade");
        check_sweep(lo, hi, per_decade);
        const auto nodes = log_spaced_nodes(lo, hi, per_decade);
        CsvWriter csv(out, {"M", "eta", "N_S", "ratio_db"});
        for (double eta : etas) {
            for (int m : nodes) {
                csv << m << eta << total << sensitivity_ratio_db(m, total, eta);
                csv.end_row();
            }
        }
    } else if (mode == "vs-loss") {
        const auto nodes = has(p, "M") ? get<std::vector<int>>(p, "M") : std::vector<int>{5, 10, 20, 50, 100, 1000};
        std::vector<double> etas;
        if (has(p, "eta")) {
            etas = get<std::vector<double>>(p, "eta");
        } else {
            const double max_db = get<double>(p, "loss_db_max");
            const int points = get<int>(p, "loss_points");
            require(max_db > 0.0, "loss_db_max must be > 0");
            require(points >= 2, "loss_points must be >= 2");
            for (int i = 0; i < points; ++i) etas.push_back(std::pow(10.0, -max_db * i / (points - 1) / 10.0));
        }
        CsvWriter csv(out, {"M", "loss_db", "eta", "N_S", "ratio_db"});
        for (int m : nodes) {
            require(m >= 1, "M values must be >= 1");
            for (double eta : etas) {
                csv << m << -10.0 * std::log10(eta) << eta << total << sensitivity_ratio_db(m, total, eta);
                csv.end_row();
            }
        }
    } else {
        throw ConfigError("mode must be vs-M or vs-loss, got '" + mode + "'");
    }
    warn_squeezing(rec.warnings, total);
    rec.outputs = {out};
    return rec;
}

// ----------------------------------------------------------------- monte-carlo

RunRecord run_monte_carlo(const json& p, const fs::path& out) {
    RunRecord rec;
    const auto nodes = get<std::vector<int>>(p, "M");
    const auto photons = get<std::vector<double>>(p, "N_S");
    const auto scheme_names = get<std::vector<std::string>>(p, "scheme");
    const double alpha = get<double>(p, "alpha");
    const auto trials = get<std::int64_t>(p, "trials");
    const auto seed = get<std::uint64_t>(p, "seed");
    require(trials >= 1, "trials must be >= 1");
    require(!(has(p, "eta") && has(p, "node_etas")), "give either eta (sweep) or node_etas (per node), not both");

    // Each entry is one channel profile: a single uniform value or a per-node vector.
    std::vector<std::vector<double>> profiles;
    if (has(p, "node_etas")) {
        profiles.push_back(get<std::vector<double>>(p, "node_etas"));
    } else {
        for (double eta : has(p, "eta") ? get<std::vector<double>>(p, "eta") : std::vector<double>{1.0}) {
            profiles.push_back({eta});
        }
    }
    const std::vector<double> weights = has(p, "weights") ? get<std::vector<double>>(p, "weights") : std::vector<double>{};
    if (profiles.front().size() > 1 || !weights.empty()) {
        require(nodes.size() == 1, "node_etas and weights need a single M");
    }

    CsvWriter csv(out, {"case", "scheme", "M", "N_S", "eta", "weights", "alpha", "trials", "seed", "empirical_mean",
                        "empirical_rms", "rms_standard_error", "analytic_rms", "z_score", "status"});
    int index = 0;
    bool all_pass = true;
    for (int m : nodes) {
        for (double total : photons) {
            for (const auto& profile : profiles) {
                for (const auto& name : scheme_names) {
                    SensorNetworkConfig cfg;
                    cfg.num_nodes = m;
                    cfg.total_photons = total;
                    cfg.etas = profile;
                    cfg.weights = weights;
                    cfg.scheme = parse_scheme(name);
                    cfg.alpha = alpha;
                    cfg.trials = trials;
                    cfg.seed = seed + static_cast<std::uint64_t>(index);
                    const EstimatorReport r = simulate_displacement_protocol(cfg);
                    const bool pass = r.rms_z_score() < kMonteCarloSigma;
                    all_pass = all_pass && pass;
                    csv << index++ << name << m << total << profile
                        << (weights.empty() ? std::vector<double>{} : weights) << alpha
                        << static_cast<long long>(trials) << static_cast<long long>(cfg.seed) << r.empirical_mean
                        << r.empirical_rms_error << r.rms_standard_error << r.analytic_rms << r.rms_z_score()
                        << status(pass);
                    csv.end_row();
                }
            }
        }
    }
    rec.outputs = {out};
    rec.exit_code = all_pass ? kExitSuccess : kExitValidation;
    return rec;
}

// -------------------------------------------------------------------- weighted

RunRecord run_weighted(const json& p, const fs::path& out) {
    RunRecord rec;
    const auto etas = get<std::vector<double>>(p, "etas");
    const double total = get<double>(p, "N_S");
    const int m = static_cast<int>(etas.size());
    const auto weights = has(p, "weights") ? get<std::vector<double>>(p, "weights")
                                           : std::vector<double>(etas.size(), 1.0 / m);
    const WeightedNetwork net(weights, etas, total);
    const bool two_node = m == 2;
    GridOptions grid;
    grid.points = get<int>(p, "grid_points");
    GridOptions joint_grid;
    joint_grid.points = get<int>(p, "joint_grid_points");
    const double nan = std::nan("");

    CsvWriter csv(out, {"kind", "M", "N_S", "etas", "weights", "photons", "objective", "kkt_residual", "iterations",
                        "grid_objective", "grid_gap"});
    auto row = [&](const char* kind, const std::vector<double>& w, const std::vector<double>& n, double objective,
                   double kkt, long long iterations, double grid_objective) {
        csv << kind << m << total << etas << w << n << objective << kkt << iterations << grid_objective
            << (std::isnan(grid_objective) ? nan : objective - grid_objective);
        csv.end_row();
    };

    row("entangled_fixed", weights, {total}, weighted_entangled_rms(net), nan, 0, nan);

    const AllocationResult alloc = allocate_photons_product(net);
    row("product_fixed", weights, alloc.photons, alloc.objective, alloc.kkt_residual, alloc.iterations,
        two_node ? grid_allocation_two_node(net, grid).value : nan);

    const WeightedOptimum ent = optimal_weights_entangled(etas, total);
    row("entangled_optimal", ent.weights, {total}, ent.objective, nan, 0,
        two_node ? grid_weights_entangled_two_node(etas, total, grid).value : nan);

    const ProductOptimum prod = optimal_weights_product(etas, total, get<int>(p, "max_alternations"));
    row("product_optimal", prod.weights, prod.allocation.photons, prod.allocation.objective,
        prod.allocation.kkt_residual, static_cast<long long>(prod.history.size() - 1),
        two_node ? grid_joint_product_two_node(etas, total, joint_grid).value : nan);

    rec.outputs = {out};
    return rec;
}

// ---------------------------------------------------------------------- fisher

RunRecord run_fisher(const json& p, const fs::path& out) {
    RunRecord rec;
    const int draws = get<int>(p, "draws");
    const auto seed = get<std::uint64_t>(p, "seed");
    const auto steps = get<std::vector<double>>(p, "steps");
    require(draws >= 0, "draws must be >= 0");

    std::vector<std::pair<SqueezedThermalParams, double>> cases;
    cases.push_back({SqueezedThermalParams{}, 1.0});
    if (has(p, "r_B")) {
        SqueezedThermalParams point;
        point.r_b = get<double>(p, "r_B");
        point.n = get<double>(p, "n");
        point.theta = get<double>(p, "theta");
        cases.push_back({point, get<double>(p, "eta")});
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double max_rb = 2.0 * std::asinh(std::sqrt(5.0));
    const double draw_etas[] = {0.5, 0.8, 1.0};
    for (int i = 0; i < draws; ++i) {
        SqueezedThermalParams d;
        d.r_b = max_rb * unit(rng);
        d.n = unit(rng);
        d.theta = std::numbers::pi * unit(rng);
        cases.push_back({d, draw_etas[i % 3]});
    }

    bool ok = true;
    {
        CsvWriter csv(out, {"row", "r_B", "n", "theta", "eta", "fisher_closed_form", "fisher_numeric",
                            "extrapolation_error", "relative_gap", "status"});
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& [params, eta] = cases[i];
            const double closed = fisher_closed_form(params, eta);
            const FisherEstimate numeric = fisher_numeric(params, eta, steps);
            const double gap = std::abs(numeric.value - closed) / closed;
            const bool pass = i == 0 ? std::abs(numeric.value - 4.0) < kVacuumFisherTol : gap < kFisherGapTol;
            ok = ok && pass;
            csv << static_cast<long long>(i) << params.r_b << params.n << params.theta << eta << closed
                << numeric.value << numeric.extrapolation_error << gap << status(pass);
            csv.end_row();
        }
    }

    const fs::path cr_out = sibling(out, "_cr");
    {
        CsvWriter csv(cr_out, {"M", "N_S", "eta", "cr_bound", "product_rms", "difference"});
        for (int m : get<std::vector<int>>(p, "cr_M")) {
            for (double total : get<std::vector<double>>(p, "cr_N_S")) {
                for (double eta : get<std::vector<double>>(p, "cr_eta")) {
                    const double bound = cr_bound_separable(m, total, eta);
                    const double eq = product_rms_error(m, total, eta);
                    csv << m << total << eta << bound << eq << bound - eq;
                    csv.end_row();
                }
            }
        }
    }
    rec.outputs = {out, cr_out};
    rec.exit_code = ok ? kExitSuccess : kExitValidation;
    return rec;
}

// ----------------------------------------------------------------------- phase

RunRecord run_phase(const json& p, const fs::path& out) {
    RunRecord rec;
    PhaseNetworkConfig base;
    base.num_nodes = get<int>(p, "M");
    base.total_photons = get<double>(p, "N_S");
    base.drive_photons = get<double>(p, "N_v");
    base.eta = get<double>(p, "eta");
    base.trials = get<std::int64_t>(p, "trials");
    base.seed = get<std::uint64_t>(p, "seed");
    const auto phases = get<std::vector<double>>(p, "phases");
    require(!phases.empty(), "phases list is empty");
    for (double phi : phases) {
        if (!(std::abs(phi) < kMaxPhaseShift)) {
            throw ConfigError("phase " + format_real(phi) + " violates the guard |phase| < 0.3");
        }
    }

    struct Row {
        const char* kind;
        PhaseNetworkConfig cfg;
    };
    std::vector<Row> rows;
    for (double phi : phases) {
        Row r{"probe", base};
        r.cfg.phase = phi;
        rows.push_back(r);
    }
    if (get<int>(p, "baseline") != 0) {
        Row r{"coherent_baseline", base};
        r.cfg.total_photons = 0.0;
        const auto nonzero = std::find_if(phases.begin(), phases.end(), [](double x) { return x != 0.0; });
        r.cfg.phase = nonzero == phases.end() ? 0.01 : *nonzero;
        rows.push_back(r);
    }

    CsvWriter csv(out, {"kind", "phase", "M", "N_S", "N_v", "eta", "trials", "empirical_mean", "empirical_rms",
                        "rms_standard_error", "closed_form_rms", "linearized_rms", "exact_rms", "exact_bias",
                        "linearization_residual", "sql_rms", "status"});
    bool ok = true;
    for (const auto& row : rows) {
        const auto& c = row.cfg;
        const PhaseReport r = simulate_phase_protocol(c);
        const auto& e = r.estimator;
        bool pass = std::abs(e.empirical_rms_error - r.exact_rms) < kMonteCarloSigma * e.rms_standard_error;
        if (c.phase == 0.0) {
            pass = pass && std::abs(e.empirical_mean) < kBiasSigma * e.empirical_rms_error / std::sqrt(double(e.trials));
        }
        ok = ok && pass;
        csv << row.kind << c.phase << c.num_nodes << c.total_photons << c.drive_photons << c.eta
            << static_cast<long long>(c.trials) << e.empirical_mean << e.empirical_rms_error << e.rms_standard_error
            << e.analytic_rms << r.linearized_rms << r.exact_rms << r.exact_bias << r.linearization_residual()
            << 1.0 / std::sqrt(c.drive_photons * c.num_nodes * c.eta) << status(pass);
        csv.end_row();
    }
    rec.outputs = {out};
    rec.exit_code = ok ? kExitSuccess : kExitValidation;
    return rec;
}

// --------------------------------------------------------------------- schemas

using K = ParamKind;

std::vector<Command> build_commands() {
    const json null;
    std::vector<Command> list;
    list.push_back({"rms-curve",
                    "rms error versus M for fixed photons per node (n_S) or fixed total (N_S)",
                    {{"scheme", K::text, "both", "entangled, product or both"},
                     {"eta", K::real_list, {1.0}, "transmissivities, one curve each"},
                     {"n_S", K::real, null, "photons per node (default 1)", "photons-per-node"},
                     {"N_S", K::real, null, "total photons, fixed across M", "total-photons"},
                     {"M_min", K::integer, 10, "smallest M"},
                     {"M_max", K::integer, 10000, "largest M"},
                     {"points_per_decade", K::integer, 20, "log spacing of M"}},
                    run_rms_curve});
    list.push_back({"ratio-curve",
                    "sensitivity ratio (product/entangled rms)^2 in dB versus M or versus loss",
                    {{"mode", K::text, null, "vs-M or vs-loss"},
                     {"N_S", K::real, 10.0, "total photons", "total-photons"},
                     {"eta", K::real_list, null, "vs-M: one curve per eta; vs-loss: explicit eta points"},
                     {"M", K::integer_list, null, "vs-loss: one curve per M", "nodes"},
                     {"M_min", K::integer, 1, "vs-M: smallest M"},
                     {"M_max", K::integer, 1000, "vs-M: largest M"},
                     {"points_per_decade", K::integer, 20, "vs-M: log spacing"},
                     {"loss_db_max", K::real, 10.0, "vs-loss: largest loss 10 log10(1/eta)"},
                     {"loss_points", K::integer, 101, "vs-loss: grid points"}},
                    run_ratio_curve});
    list.push_back({"monte-carlo",
                    "homodyne Monte Carlo of the displacement protocols against the closed forms",
                    {{"M", K::integer_list, null, "node counts", "nodes"},
                     {"N_S", K::real_list, null, "total photon numbers", "total-photons"},
                     {"eta", K::real_list, null, "uniform transmissivities to sweep (default 1)"},
                     {"node_etas", K::real_list, null, "one transmissivity per node"},
                     {"weights", K::real_list, null, "estimator weights, one per node (default 1/M)"},
                     {"scheme", K::text_list, {"entangled"}, "entangled and/or product"},
                     {"alpha", K::real, 0.0, "true displacement"},
                     {"trials", K::integer, 100000, "trials per case"},
                     {"seed", K::integer, 1, "RNG seed"}},
                    run_monte_carlo});
    list.push_back({"weighted",
                    "weighted-sum sensing with unequal transmissivities: allocation and weight optimisation",
                    {{"etas", K::real_list, null, "per-node transmissivities"},
                     {"N_S", K::real, null, "total photons", "total-photons"},
                     {"weights", K::real_list, null, "fixed weights (default uniform)"},
                     {"grid_points", K::integer, 2000, "first-pass points of the two-node 1-D grid oracles"},
                     {"joint_grid_points", K::integer, 200, "first-pass points per axis of the joint grid"},
                     {"max_alternations", K::integer, kAlternationMaxIterations, "cap on weight/photon alternations"}},
                    run_weighted});
    list.push_back({"fisher",
                    "Fisher information: numeric fidelity route versus closed form, and the separable CR bound",
                    {{"draws", K::integer, 20, "random probe draws"},
                     {"seed", K::integer, 1, "RNG seed for the draws"},
                     {"steps", K::real_list, json(kDefaultFisherSteps), "finite-difference steps, decreasing"},
                     {"r_B", K::real, null, "extra probe: squeeze parameter", "r-b"},
                     {"n", K::real, 0.0, "extra probe: thermal occupation"},
                     {"theta", K::real, 0.0, "extra probe: rotation angle"},
                     {"eta", K::real, 1.0, "extra probe: transmissivity"},
                     {"cr_M", K::integer_list, {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000}, "CR table node counts"},
                     {"cr_N_S", K::real_list, {0.0, 1.0, 10.0, 100.0, 1000.0}, "CR table photon numbers"},
                     {"cr_eta", K::real_list, {0.5, 1.0}, "CR table transmissivities"}},
                    run_fisher});
    list.push_back({"phase",
                    "exact Gaussian simulation of the interferometric phase-sensing network",
                    {{"M", K::integer, 2, "nodes", "nodes"},
                     {"N_S", K::real, 2.0, "squeezed photons in the entangled probe", "total-photons"},
                     {"N_v", K::real, 100.0, "coherent drive photons per node", "drive-photons"},
                     {"eta", K::real, 1.0, "transmissivity after the interferometers"},
                     {"phases", K::real_list, {0.0, 0.005, 0.01, 0.02}, "phase shifts, |phase| < 0.3"},
                     {"baseline", K::integer, 1, "1 adds a coherent-only (N_S = 0) row"},
                     {"trials", K::integer, 100000, "trials per row"},
                     {"seed", K::integer, 1, "RNG seed"}},
                    run_phase});
    return list;
}

}  // namespace

std::vector<int> log_spaced_nodes(int lo, int hi, int per_decade) {
    std::vector<int> nodes;
    for (int k = 0;; ++k) {
        const double v = lo * std::pow(10.0, static_cast<double>(k) / per_decade);
        const auto m = static_cast<long long>(std::llround(v));
        if (m >= hi) break;
        if (nodes.empty() || m != nodes.back()) nodes.push_back(static_cast<int>(m));
    }
    nodes.push_back(hi);
    return nodes;
}

const std::vector<Command>& commands() {
    static const std::vector<Command> list = build_commands();
    return list;
}

const Command& find_command(std::string_view name) {
    for (const auto& c : commands()) {
        if (c.name == name) return c;
    }
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

RunRecord execute(const Command& command, const json& params, const fs::path& out) {
    if (out.empty()) throw ConfigError("--out is required");
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    RunRecord rec;
    try {
        rec = command.run(params, out);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad parameter value: ") + e.what());
    }
    rec.command = command.name;
    rec.parameters = params;
    write_manifest(rec);
    return rec;
}

ReplayResult replay(const fs::path& manifest_path, const fs::path& out_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open manifest " + manifest_path.string());
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
    }
    if (manifest.value("schema_version", 0) != kManifestSchemaVersion) {
        throw ConfigError("unsupported manifest schema version");
    }
    const Command& command = find_command(manifest.at("command").get<std::string>());
    const auto& outputs = manifest.at("outputs");
    const fs::path primary = out_dir / outputs.at(0).at("file").get<std::string>();
    const RunRecord rec = execute(command, manifest.at("parameters"), primary);

    ReplayResult result;
    result.outputs = rec.outputs;
    for (const auto& o : outputs) {
        const fs::path produced = out_dir / o.at("file").get<std::string>();
        if (!fs::exists(produced)) {
            result.mismatches.push_back(o.at("file").get<std::string>() + ": not produced");
        } else if (sha256_file(produced) != o.at("sha256").get<std::string>()) {
            result.mismatches.push_back(o.at("file").get<std::string>() + ": checksum differs");
        }
    }
    return result;
}

}  // namespace cvsense::cli

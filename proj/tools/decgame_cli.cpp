// Command line front end: model generation, Stage-1 synthesis, Stage-2
// robust solving, baseline evaluation, sweeps, and program exports.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "decgame/bnb.hpp"
#include "decgame/evaluate.hpp"
#include "decgame/experiment.hpp"
#include "decgame/json_io.hpp"
#include "decgame/milp.hpp"
#include "decgame/netsec.hpp"
#include "decgame/synthesis.hpp"
#include "decgame/validate.hpp"
#include "decgame/version.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace decgame;

// Exit codes: 0 ok, 2 usage, 3 invalid model, 4 infeasible / no strong
// strategy, 5 internal.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvalidModel = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitInternal = 5;

OneSidedPosg load_model(const std::string& path) { return posg_from_json(read_file(path)); }

/// Rebuilds the unfolding + reduction for a strategy-set group and converts
/// entries back into strategies on the unfolded game.
struct PreparedSet {
    UnfoldedPosg unfolded;
    ParametricMdp pmdp;
    std::vector<InfiltratorStrategy> strategies;
    int k = 1;
};

PreparedSet prepare_set(const OneSidedPosg& posg, const std::vector<StrategySetEntry>& entries,
                        int k) {
    PreparedSet out;
    out.k = k;
    out.unfolded = unfold_memory(posg, k);
    out.pmdp = posg_to_pmdp(out.unfolded.posg);
    for (const auto& e : entries) {
        if (e.k != k) continue;
        Instantiation u;
        u.values.assign(out.pmdp.num_parameters(), 0.0);
        for (const auto& [name, value] : e.parameters) u.values[out.pmdp.parameter_index(name)] = value;
        InfiltratorStrategy s = istrat(out.pmdp, u);
        s.memory_nodes = k;
        out.strategies.push_back(std::move(s));
    }
    return out;
}

std::vector<int> distinct_ks(const std::vector<StrategySetEntry>& entries) {
    std::vector<int> ks;
    for (const auto& e : entries)
        if (std::find(ks.begin(), ks.end(), e.k) == ks.end()) ks.push_back(e.k);
    std::sort(ks.begin(), ks.end());
    return ks;
}

Json solve_result_json(const OneSidedPosg& game, const BnbResult& result, int k) {
    Json j;
    Json strat = Json::object();
    for (int s = 0; s < game.game.num_states(); ++s)
        if (result.strategy.has_choice(s))
            strat[game.game.state_names[s]] = game.game.action_names[result.strategy.choice[s]];
    j["strategy"] = std::move(strat);
    j["value"] = result.value;
    j["attaining_index"] = result.attaining_index;
    j["nodes_explored"] = result.nodes_explored;
    j["proof_gap"] = result.proof_gap;
    j["k"] = k;
    return j;
}

DeceiverStrategy strategy_from_json(const OneSidedPosg& game, const std::string& text) {
    Json j = Json::parse(text);
    const Json& strat = j.contains("strategy") ? j.at("strategy") : j;
    DeceiverStrategy d;
    d.choice.assign(game.game.num_states(), -1);
    for (const auto& [state, action] : strat.items())
        d.choice[game.game.state_index(state)] = game.game.action_index(action.get<std::string>());
    return d;
}

std::vector<StrategySetEntry> entries_from_result(const SynthesisResult& result) {
    std::vector<StrategySetEntry> entries;
    for (const auto& s : result.strategies) {
        StrategySetEntry e;
        for (int p = 0; p < result.pmdp.num_parameters(); ++p)
            e.parameters.emplace_back(result.pmdp.parameters[p].name, s.instantiation.values[p]);
        e.value = s.value;
        e.strong = s.strong;
        e.k = result.k;
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deception-game solver toolkit"};
    app.set_version_flag("--version", std::string("decgame ") + kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    double tol = 1e-6;
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--out", out, "output file or directory");
    app.add_option("--format", format, "table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol", tol, "numeric tolerance for ordering/gap checks")
        ->capture_default_str();

    // generate ---------------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "generate the n-layer network infiltration game");
    int layers = 4;
    double discount = 0.9;
    std::string config_file;
    gen->add_option("--layers", layers, "network layers (>= 1)")->capture_default_str();
    gen->add_option("--discount", discount, "discount factor in [0,1)")->capture_default_str();
    gen->add_option("--config", config_file, "network config JSON (overrides flags)");

    // validate ---------------------------------------------------------------
    auto* val = app.add_subcommand("validate", "check a model file against the invariants");
    std::string val_model;
    val->add_option("model", val_model, "POSG JSON file")->required();

    // synth ------------------------------------------------------------------
    auto* syn = app.add_subcommand("synth", "stage 1: synthesize infiltrator strategies");
    std::string syn_model;
    int syn_k = 1, syn_n = 10, syn_restarts = 0;
    double syn_kappa = std::numeric_limits<double>::quiet_NaN();
    bool syn_weak_fill = false;
    syn->add_option("model", syn_model, "POSG JSON file")->required();
    syn->add_option("-k,--memory", syn_k, "infiltrator memory size")->capture_default_str();
    syn->add_option("-N,--count", syn_n, "strategies to return")->capture_default_str();
    syn->add_option("--kappa", syn_kappa, "strength threshold (default: uniform-strategy value)");
    syn->add_option("--restarts", syn_restarts, "seeded restarts (default: 4N, min 32)");
    syn->add_flag("--allow-weak-fill", syn_weak_fill, "pad with below-threshold strategies");

    // solve ------------------------------------------------------------------
    auto* sol = app.add_subcommand("solve", "stage 2: robust deceiver strategy via branch and bound");
    std::string sol_model, sol_set;
    sol->add_option("model", sol_model, "POSG JSON file")->required();
    sol->add_option("strategies", sol_set, "strategy-set JSON file")->required();

    // eval -------------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "worst-case value of a policy against a strategy set");
    std::string ev_model, ev_set, ev_policy, ev_labels;
    ev->add_option("model", ev_model, "POSG JSON file")->required();
    ev->add_option("strategies", ev_set, "strategy-set JSON file")->required();
    ev->add_option("policy", ev_policy,
                   "optimal | always_engage | always_block | strategy JSON file")
        ->required();
    ev->add_option("--labels", ev_labels, "labels file (required for baselines)");

    // export-milp ------------------------------------------------------------
    auto* exm = app.add_subcommand("export-milp", "LP-format export of the stage-2 program");
    std::string exm_model, exm_set;
    exm->add_option("model", exm_model, "POSG JSON file")->required();
    exm->add_option("strategies", exm_set, "strategy-set JSON file")->required();

    // export-robust-milp -----------------------------------------------------
    auto* exr = app.add_subcommand("export-robust-milp",
                                   "annotated export of the robust program (uncertain rows marked)");
    std::string exr_model;
    exr->add_option("model", exr_model, "POSG JSON file")->required();

    // experiment ---------------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "sweep over (k, N, seed) cells");
    int exp_layers = 4;
    double exp_discount = 0.9;
    std::vector<int> exp_k = {1};
    std::vector<int> exp_n = {10};
    std::vector<std::uint64_t> exp_seeds = {1};
    std::string exp_model, exp_labels, exp_config;
    int exp_restarts = 0;
    exp->add_option("--layers", exp_layers, "netsec layers")->capture_default_str();
    exp->add_option("--discount", exp_discount, "discount factor")->capture_default_str();
    exp->add_option("--config", exp_config, "network config JSON");
    exp->add_option("--model", exp_model, "model file (with --labels, instead of netsec)");
    exp->add_option("--labels", exp_labels, "labels file for --model");
    exp->add_option("-k,--memory", exp_k, "memory sizes")->delimiter(',');
    exp->add_option("-N,--counts", exp_n, "strategy-set sizes, strictly increasing")->delimiter(',');
    exp->add_option("--seeds", exp_seeds, "seeds")->delimiter(',');
    exp->add_option("--restarts", exp_restarts, "synthesis restarts per cell");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            NetworkConfig config;
            if (!config_file.empty()) {
                config = network_config_from_json(read_file(config_file));
            } else {
                config.layers = layers;
                config.discount = discount;
            }
            NetsecModel model = generate(config);
            auto report = validate(model.posg);
            if (!report.empty()) {
                std::cerr << "generated model failed validation:\n" << format_violations(report);
                return kExitInternal;
            }
            std::string base = out.empty() ? "netsec" : out;
            std::filesystem::path p(base);
            if (!p.parent_path().empty()) std::filesystem::create_directories(p.parent_path());
            write_file(base + ".model.json", posg_to_json(model.posg));
            write_file(base + ".labels.json", netsec_labels_to_json(model));
            std::cout << "wrote " << base << ".model.json (" << model.state_count << " states, "
                      << model.deceiver_action_entries << " deceiver action entries, "
                      << model.infiltrator_action_entries << " infiltrator action entries)\n";
            return kExitOk;
        }

        if (*val) {
            OneSidedPosg posg = load_model(val_model);
            auto report = validate(posg);
            if (report.empty()) {
                std::cout << "valid\n";
                return kExitOk;
            }
            std::cout << format_violations(report);
            return kExitInvalidModel;
        }

        if (*syn) {
            OneSidedPosg posg = load_model(syn_model);
            require_valid(posg);
            SynthesisConfig cfg;
            cfg.memory_k = syn_k;
            cfg.max_strategies = syn_n;
            cfg.rng_seed = seed;
            cfg.strength_threshold = syn_kappa;
            cfg.allow_weak_fill = syn_weak_fill;
            cfg.restarts = syn_restarts > 0 ? syn_restarts : std::max(32, 4 * syn_n);
            SynthesisResult result = generate_strategy_set(posg, cfg);
            std::string text = strategy_set_to_json(entries_from_result(result));
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
            int strong = 0;
            for (const auto& s : result.strategies) strong += s.strong ? 1 : 0;
            std::fprintf(stderr,
                         "synth: %zu strategies (%d strong), kappa=%.6g, restarts=%d, "
                         "ccp_iterations=%ld, wall=%.2fs\n",
                         result.strategies.size(), strong, result.kappa, result.stats.restarts_used,
                         result.stats.ccp_iterations, result.stats.wall_time_s);
            return kExitOk;
        }

        if (*sol) {
            OneSidedPosg posg = load_model(sol_model);
            auto entries = strategy_set_from_json(read_file(sol_set));
            if (entries.empty()) throw DomainError("strategy set is empty");
            Json results = Json::array();
            double combined = -std::numeric_limits<double>::infinity();
            for (int k : distinct_ks(entries)) {
                PreparedSet set = prepare_set(posg, entries, k);
                MilpProblem milp =
                    build_milp(set.unfolded.posg, set.strategies, compute_big_m(set.unfolded.posg));
                BnbResult solved = solve_milp_bnb(set.unfolded.posg, set.strategies, milp);
                if (solved.proof_gap > tol) throw InternalError("proof gap exceeds tolerance");
                combined = std::max(combined, solved.value);
                results.push_back(solve_result_json(set.unfolded.posg, solved, k));
            }
            Json j = results.size() == 1 ? results.front() : Json();
            if (results.size() > 1) {
                j["per_k"] = std::move(results);
                j["combined_worst_case"] = combined;
            }
            std::string text = j.dump(2) + "\n";
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
            return kExitOk;
        }

        if (*ev) {
            OneSidedPosg posg = load_model(ev_model);
            auto entries = strategy_set_from_json(read_file(ev_set));
            if (entries.empty()) throw DomainError("strategy set is empty");
            double combined = -std::numeric_limits<double>::infinity();
            for (int k : distinct_ks(entries)) {
                PreparedSet set = prepare_set(posg, entries, k);
                DeceiverStrategy d;
                if (ev_policy == "optimal") {
                    MilpProblem milp = build_milp(set.unfolded.posg, set.strategies,
                                                  compute_big_m(set.unfolded.posg));
                    d = solve_milp_bnb(set.unfolded.posg, set.strategies, milp).strategy;
                } else if (ev_policy == "always_engage" || ev_policy == "always_block") {
                    if (ev_labels.empty()) throw DomainError("baselines need --labels");
                    NetsecModel model =
                        netsec_model_from_files(read_file(ev_model), read_file(ev_labels));
                    d = lift_deceiver_strategy(
                        set.unfolded,
                        baseline_strategy(model.posg, model.labels,
                                          ev_policy == "always_engage" ? BaselineKind::AlwaysEngage
                                                                       : BaselineKind::AlwaysBlock));
                } else {
                    d = strategy_from_json(set.unfolded.posg, read_file(ev_policy));
                }
                combined = std::max(combined, worst_case_value(set.unfolded.posg, d, set.strategies).first);
            }
            std::printf("%.10g\n", combined);
            return kExitOk;
        }

        if (*exm) {
            OneSidedPosg posg = load_model(exm_model);
            auto entries = strategy_set_from_json(read_file(exm_set));
            if (entries.empty()) throw DomainError("refusing to export an empty program");
            auto ks = distinct_ks(entries);
            if (ks.size() != 1) throw DomainError("export-milp needs a single-k strategy set");
            PreparedSet set = prepare_set(posg, entries, ks.front());
            MilpProblem milp =
                build_milp(set.unfolded.posg, set.strategies, compute_big_m(set.unfolded.posg));
            std::string text = export_milp(milp);
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
            return kExitOk;
        }

        if (*exr) {
            OneSidedPosg posg = load_model(exr_model);
            std::string text = build_robust_milp_export(posg);
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
            return kExitOk;
        }

        if (*exp) {
            ExperimentSpec spec;
            if (!exp_model.empty()) {
                spec.model_file = exp_model;
                spec.labels_file = exp_labels;
            } else if (!exp_config.empty()) {
                spec.netsec = network_config_from_json(read_file(exp_config));
            } else {
                NetworkConfig config;
                config.layers = exp_layers;
                config.discount = exp_discount;
                spec.netsec = config;
            }
            spec.k_list = exp_k;
            spec.n_list = exp_n;
            spec.seeds = exp_seeds;
            spec.out_dir = out.empty() ? "experiment_out" : out;
            spec.format = format == "json" ? ExperimentSpec::Format::Json : ExperimentSpec::Format::Csv;
            spec.tolerance = tol;
            if (exp_restarts > 0) spec.synth.restarts = exp_restarts;
            else spec.synth.restarts = std::max(32, 3 * spec.n_list.back());
            ExperimentReport report = run_experiment(spec);
            std::cout << experiment_rows_to_csv(report.rows);
            for (const auto& v : report.trend_violations) std::cerr << "TREND VIOLATION: " << v << "\n";
            for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
            std::cerr << "wrote " << spec.out_dir << "/experiment."
                      << (spec.format == ExperimentSpec::Format::Csv ? "csv" : "json") << "\n";
            return report.trend_violations.empty() ? kExitOk : kExitInternal;
        }
    } catch (const NoStrongStrategyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidModel;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

#include "decgame/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "decgame/bnb.hpp"
#include "decgame/evaluate.hpp"
#include "decgame/json_io.hpp"
#include "decgame/validate.hpp"
#include "decgame/version.hpp"

namespace decgame {

using Json = nlohmann::ordered_json;

namespace {

std::string num_csv(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string experiment_rows_to_csv(const std::vector<ExperimentRow>& rows) {
    std::ostringstream os;
    os << "layers,k,N,policy,worst_case_value,nodes_explored,seed\n";
    for (const auto& r : rows)
        os << r.layers << "," << r.k << "," << r.n << "," << r.policy << ","
           << num_csv(r.worst_case_value) << "," << r.nodes_explored << "," << r.seed << "\n";
    return os.str();
}

std::string experiment_rows_to_json(const std::vector<ExperimentRow>& rows) {
    Json j = Json::array();
    for (const auto& r : rows) {
        Json rj;
        rj["layers"] = r.layers;
        rj["k"] = r.k;
        rj["N"] = r.n;
        rj["policy"] = r.policy;
        rj["worst_case_value"] = r.worst_case_value;
        rj["nodes_explored"] = r.nodes_explored;
        rj["seed"] = r.seed;
        j.push_back(std::move(rj));
    }
    return j.dump(2) + "\n";
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    if (spec.seeds.empty()) throw DomainError("experiment needs at least one seed");
    for (std::size_t i = 1; i < spec.n_list.size(); ++i)
        if (spec.n_list[i] <= spec.n_list[i - 1])
            throw DomainError("N list must be strictly increasing");
    if (spec.n_list.empty()) throw DomainError("experiment needs at least one N");

    NetsecModel model;
    if (spec.netsec.has_value()) {
        model = generate(*spec.netsec);
    } else {
        model = netsec_model_from_files(read_file(spec.model_file), read_file(spec.labels_file));
    }
    require_valid(model.posg);
    const int layers = model.config.layers;
    const int n_max = spec.n_list.back();

    ExperimentReport report;
    for (int k : spec.k_list) {
        for (std::uint64_t seed : spec.seeds) {
            SynthesisConfig cfg = spec.synth;
            cfg.memory_k = k;
            cfg.rng_seed = seed;
            cfg.max_strategies = n_max;
            cfg.allow_weak_fill = true;  // sweeps prefer full tables over failures
            SynthesisResult synth = generate_strategy_set(model.posg, cfg);
            const OneSidedPosg& game = synth.unfolded.posg;
            if (synth.strategies.empty()) continue;

            DeceiverStrategy engage = lift_deceiver_strategy(
                synth.unfolded, baseline_strategy(model.posg, model.labels, BaselineKind::AlwaysEngage));
            DeceiverStrategy block = lift_deceiver_strategy(
                synth.unfolded, baseline_strategy(model.posg, model.labels, BaselineKind::AlwaysBlock));

            double previous_optimal = -std::numeric_limits<double>::infinity();
            for (int want_n : spec.n_list) {
                int use_n = std::min<int>(want_n, static_cast<int>(synth.strategies.size()));
                std::vector<InfiltratorStrategy> prefix;
                prefix.reserve(use_n);
                for (int i = 0; i < use_n; ++i) prefix.push_back(synth.strategies[i].strategy);
                if (use_n < want_n)
                    report.notes.push_back("k=" + std::to_string(k) + " seed=" + std::to_string(seed) +
                                           ": only " + std::to_string(use_n) + " strategies for N=" +
                                           std::to_string(want_n));

                auto t0 = std::chrono::steady_clock::now();
                MilpProblem milp = build_milp(game, prefix, compute_big_m(game));
                BnbResult solved = solve_milp_bnb(game, prefix, milp);
                auto t1 = std::chrono::steady_clock::now();

                double engage_value = worst_case_value(game, engage, prefix).first;
                double block_value = worst_case_value(game, block, prefix).first;
                if (solved.value > engage_value + spec.tolerance ||
                    solved.value > block_value + spec.tolerance)
                    throw InternalError("optimal value exceeds a baseline; solver bug");
                if (solved.value < previous_optimal - spec.tolerance)
                    report.trend_violations.push_back(
                        "optimal value decreased in N at k=" + std::to_string(k) +
                        " seed=" + std::to_string(seed) + " N=" + std::to_string(want_n));
                previous_optimal = std::max(previous_optimal, solved.value);

                ExperimentRow row;
                row.layers = layers;
                row.k = k;
                row.n = want_n;
                row.seed = seed;
                row.policy = "optimal";
                row.worst_case_value = solved.value;
                row.nodes_explored = solved.nodes_explored;
                row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
                report.rows.push_back(row);
                row.policy = "always_engage";
                row.worst_case_value = engage_value;
                row.nodes_explored = 0;
                row.wall_time_s = 0.0;
                report.rows.push_back(row);
                row.policy = "always_block";
                row.worst_case_value = block_value;
                report.rows.push_back(row);
            }
        }
    }

    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        std::string base = spec.out_dir + "/experiment";
        if (spec.format == ExperimentSpec::Format::Csv)
            write_file(base + ".csv", experiment_rows_to_csv(report.rows));
        else
            write_file(base + ".json", experiment_rows_to_json(report.rows));

        Json prov;
        prov["tool"] = std::string("decgame ") + kVersion;
        prov["config"] = Json::parse(network_config_to_json(model.config));
        Json seeds = Json::array();
        for (auto s : spec.seeds) seeds.push_back(s);
        prov["seeds"] = std::move(seeds);
        prov["k_list"] = spec.k_list;
        prov["n_list"] = spec.n_list;
        Json tol;
        tol["ordering"] = spec.tolerance;
        tol["fixed_point_residual"] = detail::kFixedPointResidual;
        tol["bnb_prune_slack"] = 1e-9;
        tol["bnb_gap"] = 1e-6;
        tol["dedup_distance"] = spec.synth.dedup_distance;
        tol["ccp_convergence"] = spec.synth.convergence_tol;
        prov["tolerances"] = std::move(tol);
        Json timings = Json::array();
        for (const auto& r : report.rows) {
            if (r.policy != "optimal") continue;
            Json t;
            t["k"] = r.k;
            t["N"] = r.n;
            t["seed"] = r.seed;
            t["solve_wall_time_s"] = r.wall_time_s;
            timings.push_back(std::move(t));
        }
        prov["timings"] = std::move(timings);
        Json notes = Json::array();
        for (const auto& n : report.notes) notes.push_back(n);
        for (const auto& v : report.trend_violations) notes.push_back("TREND VIOLATION: " + v);
        prov["notes"] = std::move(notes);
        write_file(spec.out_dir + "/provenance.json", prov.dump(2) + "\n");
    }
    return report;
}

}  // namespace decgame

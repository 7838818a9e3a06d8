#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decgame/netsec.hpp"
#include "decgame/synthesis.hpp"

namespace decgame {

struct ExperimentSpec {
    std::optional<NetworkConfig> netsec;  // generate the model per run
    std::string model_file;               // alternative: load from files
    std::string labels_file;
    std::vector<int> k_list = {1};
    std::vector<int> n_list = {10};       // strictly increasing
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir;
    enum class Format { Csv, Json } format = Format::Csv;
    SynthesisConfig synth;                // per-cell base; seed/k/N overridden
    double tolerance = 1e-6;              // ordering checks
};

struct ExperimentRow {
    int layers = 0;
    int k = 1;
    int n = 0;
    std::string policy;  // optimal | always_engage | always_block
    double worst_case_value = 0.0;
    double wall_time_s = 0.0;  // provenance only; excluded from the table
    long nodes_explored = 0;
    std::uint64_t seed = 0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::vector<std::string> trend_violations;  // nondecreasing-in-N breaches
    std::vector<std::string> notes;
};

/// Runs the full sweep: per (k, seed) synthesize once at the largest N, take
/// value-sorted prefixes for the smaller N, solve the robust program and
/// evaluate both baselines. Writes experiment.(csv|json) and provenance.json
/// into out_dir when set. Optimal <= baseline is asserted; the
/// nondecreasing-in-N trend is checked and flagged.
ExperimentReport run_experiment(const ExperimentSpec& spec);

std::string experiment_rows_to_csv(const std::vector<ExperimentRow>& rows);
std::string experiment_rows_to_json(const std::vector<ExperimentRow>& rows);

}  // namespace decgame

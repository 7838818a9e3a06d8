#pragma once

#include <string>
#include <vector>

#include "decgame/model.hpp"
#include "decgame/pmdp.hpp"

namespace decgame {

/// One synthesized infiltrator strategy as stored in a strategy-set file.
struct StrategySetEntry {
    std::vector<std::pair<std::string, double>> parameters;  // name -> value, parameter order
    double value = 0.0;
    bool strong = false;
    int k = 1;
};

// POSG files: states/actions/transitions/costs/initial/targets/discount,
// probabilities as decimal strings.
std::string posg_to_json(const OneSidedPosg& posg);
OneSidedPosg posg_from_json(const std::string& text);

// pMDP files: POSG format plus parameters and expression-valued probs.
std::string pmdp_to_json(const ParametricMdp& pmdp);
ParametricMdp pmdp_from_json(const std::string& text);

std::string strategy_set_to_json(const std::vector<StrategySetEntry>& entries);
std::vector<StrategySetEntry> strategy_set_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace decgame

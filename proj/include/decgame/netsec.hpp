#pragma once

#include <string>
#include <vector>

#include "decgame/model.hpp"

namespace decgame {

enum class InfAction { Compromise, Exfiltrate, Takedown, Wait };
enum class DecMode { None, Engage, Block };

std::string to_string(InfAction a);
std::string to_string(DecMode m);

/// One row of the joint-action loss table; cost = constant + per_layer * x.
struct CostEntry {
    bool detected;
    InfAction infiltrator_action;
    DecMode deceiver_mode;
    double constant = 0.0;
    double per_layer = 0.0;
};

struct NetworkConfig {
    int layers = 4;
    /// Probability that the action flips detection from false to true while
    /// undetected. Takedown always restarts the attack undetected, so its
    /// entry is informational.
    Rational detect_compromise = Rational(1, 2);
    Rational detect_exfiltrate = Rational(1, 10);
    Rational detect_wait = Rational(0);
    Rational detect_takedown = Rational(1);
    double discount = 0.9;
    std::vector<CostEntry> cost_table;  // defaults to the 9-entry loss table

    static std::vector<CostEntry> default_cost_table();
    /// Empty when valid.
    std::vector<std::string> problems() const;
};

/// Hidden structure of one generated state.
struct NetworkState {
    int position = 0;  // 0 = outside, layers = goal
    bool detected = false;
    Player mover = Player::Deceiver;
    DecMode pending = DecMode::None;  // deceiver's recorded move, infiltrator turns only
    bool terminal = false;
};

struct NetsecModel {
    OneSidedPosg posg;
    std::vector<NetworkState> labels;  // per state
    // metadata
    int state_count = 0;               // 5*layers + 2
    int deceiver_action_entries = 0;   // sum of |Act(s)| over deceiver states
    int infiltrator_action_entries = 0;
    NetworkConfig config;
};

/// Builds the n-layer infiltration game: per round the deceiver moves first
/// (engage/block when the infiltrator is detected, a forced noop otherwise;
/// the choice is recorded in the successor state), then the infiltrator
/// picks compromise/exfiltrate/takedown/wait and pays the joint-action loss.
/// The infiltrator observes only its position and turn phase, never the
/// detection flag or the pending deceiver move. Reaching layer n is the
/// target.
NetsecModel generate(const NetworkConfig& config);

enum class BaselineKind { AlwaysEngage, AlwaysBlock };

/// Engage (or block) at every detected deceiver state; forced moves
/// elsewhere. Throws DomainError when the model/labels do not look like
/// generator output.
DeceiverStrategy baseline_strategy(const OneSidedPosg& posg, const std::vector<NetworkState>& labels,
                                   BaselineKind kind);

std::string netsec_labels_to_json(const NetsecModel& model);
NetsecModel netsec_model_from_files(const std::string& posg_json, const std::string& labels_json);
std::string network_config_to_json(const NetworkConfig& config);
NetworkConfig network_config_from_json(const std::string& text);

}  // namespace decgame

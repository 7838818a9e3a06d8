#include "decgame/netsec.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "decgame/json_io.hpp"
#include "decgame/validate.hpp"

namespace decgame {

using Json = nlohmann::ordered_json;

std::string to_string(InfAction a) {
    switch (a) {
        case InfAction::Compromise: return "compromise";
        case InfAction::Exfiltrate: return "exfiltrate";
        case InfAction::Takedown: return "takedown";
        case InfAction::Wait: return "wait";
    }
    return "?";
}

std::string to_string(DecMode m) {
    switch (m) {
        case DecMode::None: return "none";
        case DecMode::Engage: return "engage";
        case DecMode::Block: return "block";
    }
    return "?";
}

std::vector<CostEntry> NetworkConfig::default_cost_table() {
    return {
        {false, InfAction::Compromise, DecMode::None, -2.0, 0.0},
        {false, InfAction::Exfiltrate, DecMode::None, 0.0, 15.0},
        {false, InfAction::Takedown, DecMode::None, 0.0, 25.0},
        {true, InfAction::Compromise, DecMode::Engage, -4.0, 0.0},
        {true, InfAction::Exfiltrate, DecMode::Engage, -2.0, 0.0},
        {true, InfAction::Takedown, DecMode::Engage, 0.0, 25.0},
        {true, InfAction::Compromise, DecMode::Block, -2.0, 0.0},
        {true, InfAction::Exfiltrate, DecMode::Block, 0.0, 0.0},
        {true, InfAction::Takedown, DecMode::Block, 0.0, 0.0},
    };
}

std::vector<std::string> NetworkConfig::problems() const {
    std::vector<std::string> out;
    if (layers < 1) out.push_back("layers must be >= 1");
    auto check_prob = [&out](const Rational& p, const char* name) {
        if (p < 0 || p > 1) out.push_back(std::string(name) + " must be in [0,1]");
    };
    check_prob(detect_compromise, "detect_compromise");
    check_prob(detect_exfiltrate, "detect_exfiltrate");
    check_prob(detect_wait, "detect_wait");
    check_prob(detect_takedown, "detect_takedown");
    if (!(discount >= 0.0) || discount >= 1.0) out.push_back("discount must be in [0,1)");
    const auto& table = cost_table.empty() ? default_cost_table() : cost_table;
    // Every joint combination of the loss table must be covered exactly once.
    for (const auto& want : default_cost_table()) {
        int hits = 0;
        for (const auto& have : table)
            if (have.detected == want.detected &&
                have.infiltrator_action == want.infiltrator_action &&
                have.deceiver_mode == want.deceiver_mode)
                ++hits;
        if (hits != 1)
            out.push_back("cost table must cover (" + std::string(want.detected ? "true" : "false") +
                          ", " + to_string(want.infiltrator_action) + ", " +
                          to_string(want.deceiver_mode) + ") exactly once");
    }
    return out;
}

namespace {

double table_cost(const std::vector<CostEntry>& table, bool detected, InfAction a, DecMode mode,
                  int layer) {
    for (const auto& e : table)
        if (e.detected == detected && e.infiltrator_action == a && e.deceiver_mode == mode)
            return e.constant + e.per_layer * layer;
    throw InternalError("cost table lookup failed");
}

}  // namespace

NetsecModel generate(const NetworkConfig& config_in) {
    NetworkConfig config = config_in;
    if (config.cost_table.empty()) config.cost_table = NetworkConfig::default_cost_table();
    auto problems = config.problems();
    if (!problems.empty()) {
        std::string msg = "invalid network config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DomainError(msg);
    }

    const int n = config.layers;
    NetsecModel model;
    model.config = config;
    OneSidedPosg& posg = model.posg;
    StochasticGame& g = posg.game;
    g.discount = config.discount;

    // Actions (global set).
    enum Act { kNoop = 0, kEngage, kBlock, kCompromise, kExfiltrate, kTakedown, kWait };
    g.action_names = {"noop", "engage", "block", "compromise", "exfiltrate", "takedown", "wait"};

    auto add_state = [&](const std::string& name, Player player, NetworkState label) {
        g.state_names.push_back(name);
        g.player.push_back(player);
        model.labels.push_back(label);
        return static_cast<int>(g.state_names.size()) - 1;
    };

    // Five states per layer x < n plus one terminal pair at x = n. The
    // detection flag is structurally hidden: observations depend on x only.
    std::vector<int> dec_undet(n), dec_det(n), inf_undet(n), inf_engage(n), inf_block(n);
    for (int x = 0; x < n; ++x) {
        std::string layer = "x" + std::to_string(x);
        dec_undet[x] = add_state(layer + "_u_D", Player::Deceiver,
                                 {x, false, Player::Deceiver, DecMode::None, false});
        dec_det[x] = add_state(layer + "_d_D", Player::Deceiver,
                               {x, true, Player::Deceiver, DecMode::None, false});
        inf_undet[x] = add_state(layer + "_u_I", Player::Infiltrator,
                                 {x, false, Player::Infiltrator, DecMode::None, false});
        inf_engage[x] = add_state(layer + "_d_I_engage", Player::Infiltrator,
                                  {x, true, Player::Infiltrator, DecMode::Engage, false});
        inf_block[x] = add_state(layer + "_d_I_block", Player::Infiltrator,
                                 {x, true, Player::Infiltrator, DecMode::Block, false});
    }
    int goal_dec = add_state("goal_D", Player::Deceiver,
                             {n, false, Player::Deceiver, DecMode::None, true});
    int goal_inf = add_state("goal_I", Player::Infiltrator,
                             {n, false, Player::Infiltrator, DecMode::None, true});

    const int num_states = g.num_states();
    g.rows.assign(num_states, {});
    posg.obs_of.assign(num_states, -1);
    posg.is_target.assign(num_states, 0);
    posg.is_target[goal_dec] = 1;
    posg.is_target[goal_inf] = 1;
    g.initial = dec_undet[0];

    for (int x = 0; x < n; ++x) posg.observation_names.push_back("z" + std::to_string(x));
    posg.observation_names.push_back("zgoal");
    for (int x = 0; x < n; ++x) {
        posg.obs_of[inf_undet[x]] = x;
        posg.obs_of[inf_engage[x]] = x;
        posg.obs_of[inf_block[x]] = x;
    }
    posg.obs_of[goal_inf] = n;

    auto dirac = [](int to) { return std::vector<std::pair<int, Rational>>{{to, Rational(1)}}; };
    auto add_row = [&g](int s, int action, double cost, std::vector<std::pair<int, Rational>> succ) {
        g.rows[s].push_back(ActionRow{action, cost, std::move(succ)});
    };

    // Deceiver turns: choice only while the infiltrator is detected.
    for (int x = 0; x < n; ++x) {
        add_row(dec_undet[x], kNoop, 0.0, dirac(inf_undet[x]));
        add_row(dec_det[x], kEngage, 0.0, dirac(inf_engage[x]));
        add_row(dec_det[x], kBlock, 0.0, dirac(inf_block[x]));
    }
    add_row(goal_dec, kNoop, 0.0, dirac(goal_inf));
    add_row(goal_inf, kWait, 0.0, dirac(goal_dec));

    // Probabilistic detection split for undetected moves that keep/advance x.
    auto detect_split = [&](int x_next, const Rational& p) {
        std::vector<std::pair<int, Rational>> succ;
        int det_next = x_next == n ? goal_dec : dec_det[x_next];
        int undet_next = x_next == n ? goal_dec : dec_undet[x_next];
        if (p == 1) return dirac(det_next);
        if (p == 0) return dirac(undet_next);
        if (det_next == undet_next) return dirac(det_next);
        succ.emplace_back(undet_next, Rational(1) - p);
        succ.emplace_back(det_next, p);
        return succ;
    };

    const auto& table = config.cost_table;
    for (int x = 0; x < n; ++x) {
        // Undetected turn: the deceiver saw nothing, no pending mode.
        add_row(inf_undet[x], kCompromise, table_cost(table, false, InfAction::Compromise, DecMode::None, x),
                detect_split(x + 1, config.detect_compromise));
        add_row(inf_undet[x], kExfiltrate, table_cost(table, false, InfAction::Exfiltrate, DecMode::None, x),
                detect_split(x, config.detect_exfiltrate));
        add_row(inf_undet[x], kTakedown, table_cost(table, false, InfAction::Takedown, DecMode::None, x),
                dirac(dec_undet[0]));  // revealed and forced to restart
        add_row(inf_undet[x], kWait, 0.0, detect_split(x, config.detect_wait));

        // Detected, deceiver engaged: progress is possible.
        add_row(inf_engage[x], kCompromise, table_cost(table, true, InfAction::Compromise, DecMode::Engage, x),
                dirac(x + 1 == n ? goal_dec : dec_det[x + 1]));
        add_row(inf_engage[x], kExfiltrate, table_cost(table, true, InfAction::Exfiltrate, DecMode::Engage, x),
                dirac(dec_det[x]));
        add_row(inf_engage[x], kTakedown, table_cost(table, true, InfAction::Takedown, DecMode::Engage, x),
                dirac(dec_undet[0]));
        add_row(inf_engage[x], kWait, 0.0, dirac(dec_det[x]));

        // Detected, deceiver blocked: compromise makes no progress.
        add_row(inf_block[x], kCompromise, table_cost(table, true, InfAction::Compromise, DecMode::Block, x),
                dirac(dec_det[x]));
        add_row(inf_block[x], kExfiltrate, table_cost(table, true, InfAction::Exfiltrate, DecMode::Block, x),
                dirac(dec_det[x]));
        add_row(inf_block[x], kTakedown, table_cost(table, true, InfAction::Takedown, DecMode::Block, x),
                dirac(dec_undet[0]));
        add_row(inf_block[x], kWait, 0.0, dirac(dec_det[x]));
    }

    model.state_count = num_states;
    for (int s = 0; s < num_states; ++s) {
        int entries = static_cast<int>(g.rows[s].size());
        if (g.is_deceiver(s))
            model.deceiver_action_entries += entries;
        else
            model.infiltrator_action_entries += entries;
    }
    return model;
}

DeceiverStrategy baseline_strategy(const OneSidedPosg& posg, const std::vector<NetworkState>& labels,
                                   BaselineKind kind) {
    if (labels.size() != posg.game.state_names.size())
        throw DomainError("labels do not match the model; not generator output");
    int engage = posg.game.action_index("engage");
    int block = posg.game.action_index("block");
    DeceiverStrategy d;
    d.choice.assign(posg.game.num_states(), -1);
    for (int s = 0; s < posg.game.num_states(); ++s) {
        if (!posg.game.is_deceiver(s)) continue;
        const NetworkState& label = labels[s];
        if (label.detected && !label.terminal) {
            int want = kind == BaselineKind::AlwaysEngage ? engage : block;
            if (posg.game.find_row(s, want) == nullptr)
                throw DomainError("state '" + posg.game.state_names[s] +
                                  "' lacks the baseline action; not generator output");
            d.choice[s] = want;
        } else {
            if (posg.game.rows[s].size() != 1)
                throw DomainError("undetected deceiver state '" + posg.game.state_names[s] +
                                  "' is not forced; not generator output");
            d.choice[s] = posg.game.rows[s].front().action;
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string network_config_to_json(const NetworkConfig& config_in) {
    NetworkConfig config = config_in;
    if (config.cost_table.empty()) config.cost_table = NetworkConfig::default_cost_table();
    Json j;
    j["layers"] = config.layers;
    Json det;
    det["compromise"] = rational_to_string(config.detect_compromise);
    det["exfiltrate"] = rational_to_string(config.detect_exfiltrate);
    det["wait"] = rational_to_string(config.detect_wait);
    det["takedown"] = rational_to_string(config.detect_takedown);
    j["detection_prob"] = std::move(det);
    j["discount"] = config.discount;
    Json table = Json::array();
    for (const auto& e : config.cost_table) {
        Json ej;
        ej["detected"] = e.detected;
        ej["infiltrator_action"] = to_string(e.infiltrator_action);
        ej["deceiver_mode"] = to_string(e.deceiver_mode);
        ej["constant"] = e.constant;
        ej["per_layer"] = e.per_layer;
        table.push_back(std::move(ej));
    }
    j["cost_table"] = std::move(table);
    return j.dump(2) + "\n";
}

namespace {
InfAction inf_action_from_string(const std::string& s) {
    if (s == "compromise") return InfAction::Compromise;
    if (s == "exfiltrate") return InfAction::Exfiltrate;
    if (s == "takedown") return InfAction::Takedown;
    if (s == "wait") return InfAction::Wait;
    throw IoError("unknown infiltrator action '" + s + "'");
}
DecMode dec_mode_from_string(const std::string& s) {
    if (s == "none" || s == "-") return DecMode::None;
    if (s == "engage") return DecMode::Engage;
    if (s == "block") return DecMode::Block;
    throw IoError("unknown deceiver mode '" + s + "'");
}
}  // namespace

NetworkConfig network_config_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("cannot parse network config: ") + e.what());
    }
    NetworkConfig config;
    if (j.contains("layers")) config.layers = j.at("layers").get<int>();
    if (j.contains("detection_prob")) {
        const auto& det = j.at("detection_prob");
        auto get = [&det](const char* key, Rational fallback) {
            if (!det.contains(key)) return fallback;
            const auto& v = det.at(key);
            return v.is_string() ? parse_rational(v.get<std::string>())
                                 : rational_from_double(v.get<double>());
        };
        config.detect_compromise = get("compromise", config.detect_compromise);
        config.detect_exfiltrate = get("exfiltrate", config.detect_exfiltrate);
        config.detect_wait = get("wait", config.detect_wait);
        config.detect_takedown = get("takedown", config.detect_takedown);
    }
    if (j.contains("discount")) config.discount = j.at("discount").get<double>();
    if (j.contains("cost_table")) {
        for (const auto& ej : j.at("cost_table")) {
            CostEntry e;
            e.detected = ej.at("detected").get<bool>();
            e.infiltrator_action = inf_action_from_string(ej.at("infiltrator_action").get<std::string>());
            e.deceiver_mode = dec_mode_from_string(ej.at("deceiver_mode").get<std::string>());
            e.constant = ej.at("constant").get<double>();
            e.per_layer = ej.at("per_layer").get<double>();
            config.cost_table.push_back(e);
        }
    }
    return config;
}

std::string netsec_labels_to_json(const NetsecModel& model) {
    Json j;
    j["config"] = Json::parse(network_config_to_json(model.config));
    Json meta;
    meta["state_count"] = model.state_count;
    meta["state_count_formula"] = "5*layers + 2";
    meta["deceiver_action_entries"] = model.deceiver_action_entries;
    meta["infiltrator_action_entries"] = model.infiltrator_action_entries;
    j["metadata"] = std::move(meta);
    Json states = Json::array();
    for (std::size_t s = 0; s < model.labels.size(); ++s) {
        const NetworkState& label = model.labels[s];
        Json st;
        st["id"] = model.posg.game.state_names[s];
        st["position"] = label.position;
        st["detected"] = label.detected;
        st["mover"] = label.mover == Player::Deceiver ? "deceiver" : "infiltrator";
        st["pending"] = to_string(label.pending);
        st["terminal"] = label.terminal;
        states.push_back(std::move(st));
    }
    j["states"] = std::move(states);
    return j.dump(2) + "\n";
}

NetsecModel netsec_model_from_files(const std::string& posg_json, const std::string& labels_json) {
    NetsecModel model;
    model.posg = posg_from_json(posg_json);
    Json j;
    try {
        j = Json::parse(labels_json);
    } catch (const std::exception& e) {
        throw IoError(std::string("cannot parse labels: ") + e.what());
    }
    model.config = network_config_from_json(j.at("config").dump());
    if (j.contains("metadata")) {
        model.state_count = j.at("metadata").value("state_count", 0);
        model.deceiver_action_entries = j.at("metadata").value("deceiver_action_entries", 0);
        model.infiltrator_action_entries = j.at("metadata").value("infiltrator_action_entries", 0);
    }
    for (const auto& st : j.at("states")) {
        NetworkState label;
        label.position = st.at("position").get<int>();
        label.detected = st.at("detected").get<bool>();
        label.mover = st.at("mover").get<std::string>() == "deceiver" ? Player::Deceiver
                                                                      : Player::Infiltrator;
        label.pending = dec_mode_from_string(st.at("pending").get<std::string>());
        label.terminal = st.at("terminal").get<bool>();
        model.labels.push_back(label);
    }
    return model;
}

}  // namespace decgame

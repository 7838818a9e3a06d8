#include "decgame/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace decgame {

using Json = nlohmann::ordered_json;

namespace {

Rational prob_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number()) return rational_from_double(j.get<double>());
    throw IoError("probability must be a decimal string or number");
}

Json game_to_json_impl(const OneSidedPosg& posg) {
    const StochasticGame& g = posg.game;
    Json j;
    Json states = Json::array();
    for (int s = 0; s < g.num_states(); ++s) {
        Json st;
        st["id"] = g.state_names[s];
        st["player"] = g.is_deceiver(s) ? "deceiver" : "infiltrator";
        if (!g.is_deceiver(s) && posg.obs_of[s] >= 0)
            st["observation"] = posg.observation_names[posg.obs_of[s]];
        states.push_back(std::move(st));
    }
    j["states"] = std::move(states);
    j["actions"] = g.action_names;
    Json trans = Json::array();
    Json costs = Json::array();
    for (int s = 0; s < g.num_states(); ++s) {
        for (const auto& row : g.rows[s]) {
            for (const auto& [succ, p] : row.successors) {
                Json t;
                t["from"] = g.state_names[s];
                t["action"] = g.action_names[row.action];
                t["to"] = g.state_names[succ];
                t["prob"] = rational_to_string(p);
                trans.push_back(std::move(t));
            }
            if (row.cost != 0.0) {
                Json c;
                c["state"] = g.state_names[s];
                c["action"] = g.action_names[row.action];
                c["cost"] = row.cost;
                costs.push_back(std::move(c));
            }
        }
    }
    j["transitions"] = std::move(trans);
    j["costs"] = std::move(costs);
    j["initial"] = g.state_names[g.initial];
    Json targets = Json::array();
    for (int s = 0; s < g.num_states(); ++s)
        if (posg.is_target[s]) targets.push_back(g.state_names[s]);
    j["targets"] = std::move(targets);
    j["discount"] = g.discount;
    return j;
}

void game_from_json_impl(const Json& j, OneSidedPosg& posg) {
    StochasticGame& g = posg.game;
    if (!j.contains("states") || !j.contains("actions"))
        throw IoError("model file needs 'states' and 'actions'");
    for (const auto& st : j.at("states")) {
        g.state_names.push_back(st.at("id").get<std::string>());
        std::string p = st.at("player").get<std::string>();
        if (p == "deceiver")
            g.player.push_back(Player::Deceiver);
        else if (p == "infiltrator")
            g.player.push_back(Player::Infiltrator);
        else
            throw IoError("state '" + g.state_names.back() + "' has unknown player '" + p + "'");
    }
    g.action_names = j.at("actions").get<std::vector<std::string>>();
    const int n = g.num_states();
    g.rows.assign(n, {});
    posg.obs_of.assign(n, -1);
    posg.is_target.assign(n, 0);

    // Observations in first-appearance order.
    for (int s = 0; s < n; ++s) {
        const auto& st = j.at("states").at(s);
        if (!st.contains("observation")) continue;
        std::string name = st.at("observation").get<std::string>();
        int z = -1;
        for (std::size_t i = 0; i < posg.observation_names.size(); ++i)
            if (posg.observation_names[i] == name) z = static_cast<int>(i);
        if (z < 0) {
            z = static_cast<int>(posg.observation_names.size());
            posg.observation_names.push_back(name);
        }
        posg.obs_of[s] = z;
    }

    auto row_of = [&g](int s, int a) -> ActionRow& {
        for (auto& row : g.rows[s])
            if (row.action == a) return row;
        g.rows[s].push_back(ActionRow{a, 0.0, {}});
        return g.rows[s].back();
    };
    for (const auto& t : j.at("transitions")) {
        int from = g.state_index(t.at("from").get<std::string>());
        int action = g.action_index(t.at("action").get<std::string>());
        int to = g.state_index(t.at("to").get<std::string>());
        row_of(from, action).successors.emplace_back(to, prob_from_json(t.at("prob")));
    }
    if (j.contains("costs")) {
        for (const auto& c : j.at("costs")) {
            int s = g.state_index(c.at("state").get<std::string>());
            int a = g.action_index(c.at("action").get<std::string>());
            row_of(s, a).cost = c.at("cost").get<double>();
        }
    }
    for (int s = 0; s < n; ++s)
        std::sort(g.rows[s].begin(), g.rows[s].end(),
                  [](const ActionRow& a, const ActionRow& b) { return a.action < b.action; });
    g.initial = g.state_index(j.at("initial").get<std::string>());
    if (j.contains("targets"))
        for (const auto& t : j.at("targets")) posg.is_target[g.state_index(t.get<std::string>())] = 1;
    g.discount = j.at("discount").get<double>();
}

Json expr_to_json(const PolynomialExpr& expr, const std::vector<Parameter>& params) {
    if (expr.is_constant()) return rational_to_string(expr.constant_value());
    Json terms = Json::array();
    for (const auto& [mono, coef] : expr.terms()) {
        Json t;
        t["coef"] = rational_to_string(coef);
        Json names = Json::array();
        for (int idx : mono) names.push_back(params.at(idx).name);
        t["params"] = std::move(names);
        terms.push_back(std::move(t));
    }
    Json j;
    j["terms"] = std::move(terms);
    return j;
}

PolynomialExpr expr_from_json(const Json& j, const ParametricMdp& pmdp) {
    if (j.is_string() || j.is_number()) return PolynomialExpr::constant(prob_from_json(j));
    PolynomialExpr expr;
    for (const auto& t : j.at("terms")) {
        PolynomialExpr term = PolynomialExpr::constant(parse_rational(t.at("coef").get<std::string>()));
        for (const auto& name : t.at("params"))
            term = term * PolynomialExpr::variable(pmdp.parameter_index(name.get<std::string>()));
        expr += term;
    }
    return expr;
}

}  // namespace

std::string posg_to_json(const OneSidedPosg& posg) {
    return game_to_json_impl(posg).dump(2) + "\n";
}

OneSidedPosg posg_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("cannot parse model JSON: ") + e.what());
    }
    OneSidedPosg posg;
    game_from_json_impl(j, posg);
    return posg;
}

std::string pmdp_to_json(const ParametricMdp& pmdp) {
    Json j;
    Json states = Json::array();
    for (int s = 0; s < pmdp.num_states(); ++s) {
        Json st;
        st["id"] = pmdp.state_names[s];
        st["player"] = pmdp.player[s] == Player::Deceiver ? "deceiver" : "infiltrator";
        if (pmdp.obs_of[s] >= 0) st["observation"] = pmdp.observation_names[pmdp.obs_of[s]];
        states.push_back(std::move(st));
    }
    j["states"] = std::move(states);
    j["actions"] = pmdp.action_names;
    Json params = Json::array();
    for (const auto& p : pmdp.parameters) {
        Json pj;
        pj["name"] = p.name;
        pj["observation"] = pmdp.observation_names[p.observation];
        pj["action_index"] = p.action_index;
        params.push_back(std::move(pj));
    }
    j["parameters"] = std::move(params);
    Json obs_actions = Json::object();
    for (const auto& block : pmdp.blocks) {
        Json names = Json::array();
        for (int a : block.actions) names.push_back(pmdp.action_names[a]);
        obs_actions[pmdp.observation_names[block.observation]] = std::move(names);
    }
    j["observation_actions"] = std::move(obs_actions);
    Json trans = Json::array();
    Json costs = Json::array();
    for (int s = 0; s < pmdp.num_states(); ++s) {
        for (const auto& row : pmdp.rows[s]) {
            for (const auto& [succ, expr] : row.successors) {
                Json t;
                t["from"] = pmdp.state_names[s];
                t["action"] = pmdp.action_names[row.action];
                t["to"] = pmdp.state_names[succ];
                t["prob"] = expr_to_json(expr, pmdp.parameters);
                trans.push_back(std::move(t));
            }
            if (!(row.cost == PolynomialExpr())) {
                Json c;
                c["state"] = pmdp.state_names[s];
                c["action"] = pmdp.action_names[row.action];
                c["cost"] = expr_to_json(row.cost, pmdp.parameters);
                costs.push_back(std::move(c));
            }
        }
    }
    j["transitions"] = std::move(trans);
    j["costs"] = std::move(costs);
    j["initial"] = pmdp.state_names[pmdp.initial];
    Json targets = Json::array();
    for (int s = 0; s < pmdp.num_states(); ++s)
        if (pmdp.is_target[s]) targets.push_back(pmdp.state_names[s]);
    j["targets"] = std::move(targets);
    j["discount"] = pmdp.discount;
    return j.dump(2) + "\n";
}

ParametricMdp pmdp_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("cannot parse pMDP JSON: ") + e.what());
    }
    ParametricMdp m;
    // Shared state/observation layout with the POSG format.
    OneSidedPosg shell;
    {
        Json plain = j;
        plain["transitions"] = Json::array();
        plain["costs"] = Json::array();
        game_from_json_impl(plain, shell);
    }
    m.state_names = shell.game.state_names;
    m.player = shell.game.player;
    m.action_names = shell.game.action_names;
    m.initial = shell.game.initial;
    m.discount = shell.game.discount;
    m.observation_names = shell.observation_names;
    m.obs_of = shell.obs_of;
    m.is_target = shell.is_target;
    m.rows.assign(m.num_states(), {});

    for (const auto& pj : j.at("parameters")) {
        Parameter p;
        p.name = pj.at("name").get<std::string>();
        std::string obs = pj.at("observation").get<std::string>();
        p.observation = -1;
        for (std::size_t i = 0; i < m.observation_names.size(); ++i)
            if (m.observation_names[i] == obs) p.observation = static_cast<int>(i);
        if (p.observation < 0) throw IoError("parameter references unknown observation '" + obs + "'");
        p.action_index = pj.at("action_index").get<int>();
        m.parameters.push_back(std::move(p));
    }
    if (j.contains("observation_actions")) {
        for (const auto& [obs, acts] : j.at("observation_actions").items()) {
            ObservationBlock block;
            block.observation = -1;
            for (std::size_t i = 0; i < m.observation_names.size(); ++i)
                if (m.observation_names[i] == obs) block.observation = static_cast<int>(i);
            if (block.observation < 0) throw IoError("unknown observation '" + obs + "'");
            for (const auto& a : acts) {
                int idx = -1;
                for (std::size_t i = 0; i < m.action_names.size(); ++i)
                    if (m.action_names[i] == a.get<std::string>()) idx = static_cast<int>(i);
                if (idx < 0) throw IoError("unknown action in observation_actions");
                block.actions.push_back(idx);
            }
            for (const auto& p : m.parameters)
                if (p.observation == block.observation)
                    block.parameters.push_back(m.parameter_index(p.name));
            m.blocks.push_back(std::move(block));
        }
    }

    auto row_of = [&m](int s, int a) -> ParametricMdp::Row& {
        for (auto& row : m.rows[s])
            if (row.action == a) return row;
        m.rows[s].push_back(ParametricMdp::Row{a, {}, {}});
        return m.rows[s].back();
    };
    for (const auto& t : j.at("transitions")) {
        int from = -1, action = -1, to = -1;
        std::string fs = t.at("from").get<std::string>();
        std::string as = t.at("action").get<std::string>();
        std::string ts = t.at("to").get<std::string>();
        for (std::size_t i = 0; i < m.state_names.size(); ++i) {
            if (m.state_names[i] == fs) from = static_cast<int>(i);
            if (m.state_names[i] == ts) to = static_cast<int>(i);
        }
        for (std::size_t i = 0; i < m.action_names.size(); ++i)
            if (m.action_names[i] == as) action = static_cast<int>(i);
        if (from < 0 || action < 0 || to < 0) throw IoError("transition references unknown ids");
        row_of(from, action).successors.emplace_back(to, expr_from_json(t.at("prob"), m));
    }
    if (j.contains("costs")) {
        for (const auto& c : j.at("costs")) {
            int s = -1, a = -1;
            std::string ss = c.at("state").get<std::string>();
            std::string as = c.at("action").get<std::string>();
            for (std::size_t i = 0; i < m.state_names.size(); ++i)
                if (m.state_names[i] == ss) s = static_cast<int>(i);
            for (std::size_t i = 0; i < m.action_names.size(); ++i)
                if (m.action_names[i] == as) a = static_cast<int>(i);
            if (s < 0 || a < 0) throw IoError("cost entry references unknown ids");
            row_of(s, a).cost = expr_from_json(c.at("cost"), m);
        }
    }
    for (int s = 0; s < m.num_states(); ++s)
        std::sort(m.rows[s].begin(), m.rows[s].end(),
                  [](const ParametricMdp::Row& a, const ParametricMdp::Row& b) {
                      return a.action < b.action;
                  });
    return m;
}

std::string strategy_set_to_json(const std::vector<StrategySetEntry>& entries) {
    Json j = Json::array();
    for (const auto& e : entries) {
        Json ej;
        Json params = Json::object();
        for (const auto& [name, value] : e.parameters) params[name] = value;
        ej["parameters"] = std::move(params);
        ej["value"] = e.value;
        ej["strong"] = e.strong;
        ej["k"] = e.k;
        j.push_back(std::move(ej));
    }
    return j.dump(2) + "\n";
}

std::vector<StrategySetEntry> strategy_set_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("cannot parse strategy set: ") + e.what());
    }
    if (!j.is_array()) throw IoError("strategy set must be a JSON list");
    std::vector<StrategySetEntry> out;
    for (const auto& ej : j) {
        StrategySetEntry e;
        for (const auto& [name, value] : ej.at("parameters").items())
            e.parameters.emplace_back(name, value.get<double>());
        e.value = ej.at("value").get<double>();
        e.strong = ej.at("strong").get<bool>();
        e.k = ej.at("k").get<int>();
        out.push_back(std::move(e));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace decgame

#include "decgame/pmdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "decgame/validate.hpp"

namespace decgame {

// ---------------------------------------------------------------------------
// PolynomialExpr
// ---------------------------------------------------------------------------

PolynomialExpr PolynomialExpr::constant(Rational value) {
    PolynomialExpr e;
    if (value != 0) e.terms_[{}] = std::move(value);
    return e;
}

PolynomialExpr PolynomialExpr::variable(int parameter_index) {
    PolynomialExpr e;
    e.terms_[{parameter_index}] = 1;
    return e;
}

void PolynomialExpr::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == 0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

PolynomialExpr& PolynomialExpr::operator+=(const PolynomialExpr& other) {
    for (const auto& [mono, coef] : other.terms_) terms_[mono] += coef;
    prune();
    return *this;
}

PolynomialExpr PolynomialExpr::operator+(const PolynomialExpr& other) const {
    PolynomialExpr out = *this;
    out += other;
    return out;
}

PolynomialExpr PolynomialExpr::operator-(const PolynomialExpr& other) const {
    return *this + other.scaled(Rational(-1));
}

PolynomialExpr PolynomialExpr::operator*(const PolynomialExpr& other) const {
    PolynomialExpr out;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : other.terms_) {
            Monomial mono = ma;
            mono.insert(mono.end(), mb.begin(), mb.end());
            std::sort(mono.begin(), mono.end());
            out.terms_[mono] += ca * cb;
        }
    }
    out.prune();
    return out;
}

PolynomialExpr PolynomialExpr::scaled(const Rational& factor) const {
    PolynomialExpr out;
    if (factor == 0) return out;
    for (const auto& [mono, coef] : terms_) out.terms_[mono] = coef * factor;
    return out;
}

int PolynomialExpr::degree() const {
    int d = 0;
    for (const auto& [mono, coef] : terms_) d = std::max(d, static_cast<int>(mono.size()));
    return d;
}

Rational PolynomialExpr::constant_value() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational PolynomialExpr::evaluate(const std::vector<Rational>& values) const {
    Rational sum = 0;
    for (const auto& [mono, coef] : terms_) {
        Rational term = coef;
        for (int idx : mono) term *= values.at(idx);
        sum += term;
    }
    return sum;
}

Rational PolynomialExpr::affine_coefficient(int parameter_index) const {
    if (degree() > 1) throw DomainError("unsupported degree: expression is not affine");
    auto it = terms_.find({parameter_index});
    return it == terms_.end() ? Rational(0) : it->second;
}

std::string PolynomialExpr::to_string(const std::vector<Parameter>& params) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mono, coef] : terms_) {
        Rational c = coef;
        if (!first) {
            os << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        } else if (c < 0) {
            os << "-";
            c = -c;
        }
        first = false;
        bool unit = (c == 1) && !mono.empty();
        if (!unit) os << rational_to_string(c);
        for (std::size_t i = 0; i < mono.size(); ++i) {
            if (!unit || i > 0) os << "*";
            os << params.at(mono[i]).name;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// ParametricMdp helpers
// ---------------------------------------------------------------------------

int ParametricMdp::parameter_index(const std::string& name) const {
    for (std::size_t i = 0; i < parameters.size(); ++i)
        if (parameters[i].name == name) return static_cast<int>(i);
    throw DomainError("unknown parameter '" + name + "'");
}

const ObservationBlock* ParametricMdp::block_for(int observation) const {
    for (const auto& b : blocks)
        if (b.observation == observation) return &b;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

ParametricMdp posg_to_pmdp(const OneSidedPosg& posg) {
    require_valid(posg);
    const StochasticGame& g = posg.game;
    const int n = g.num_states();

    ParametricMdp m;
    m.state_names = g.state_names;
    m.player = g.player;
    m.action_names = g.action_names;
    m.initial = g.initial;
    m.discount = g.discount;
    m.observation_names = posg.observation_names;
    m.obs_of = posg.obs_of;
    m.is_target = posg.is_target;
    m.rows.assign(n, {});

    // One block per observation with at least two enabled actions; ObAct
    // probabilities pair with actions in descending id order and the lowest
    // id carries the remainder.
    int bot_action = -1;
    for (int z = 0; z < posg.num_observations(); ++z) {
        int witness = -1;
        for (int s = 0; s < n && witness < 0; ++s)
            if (!g.is_deceiver(s) && posg.obs_of[s] == z) witness = s;
        if (witness < 0) continue;
        std::vector<int> actions = g.enabled_actions(witness);
        std::sort(actions.rbegin(), actions.rend());
        if (actions.size() < 2) continue;
        ObservationBlock block;
        block.observation = z;
        block.actions = actions;
        for (std::size_t i = 0; i + 1 < actions.size(); ++i) {
            Parameter p;
            p.observation = z;
            p.action_index = static_cast<int>(i) + 1;
            p.name = "p_" + posg.observation_names[z] + "_" + std::to_string(p.action_index);
            block.parameters.push_back(static_cast<int>(m.parameters.size()));
            m.parameters.push_back(std::move(p));
        }
        m.blocks.push_back(std::move(block));
        if (bot_action < 0) {
            bot_action = static_cast<int>(m.action_names.size());
            m.action_names.push_back("bot");
        }
    }

    for (int s = 0; s < n; ++s) {
        if (g.is_deceiver(s)) {
            for (const auto& row : g.rows[s]) {
                ParametricMdp::Row out;
                out.action = row.action;
                out.cost = PolynomialExpr::constant(rational_from_double(row.cost));
                for (const auto& [succ, p] : row.successors)
                    out.successors.emplace_back(succ, PolynomialExpr::constant(p));
                m.rows[s].push_back(std::move(out));
            }
            continue;
        }
        const ObservationBlock* block = m.block_for(posg.obs_of[s]);
        if (block == nullptr) {
            // Single enabled action: distribution unchanged, no parameter.
            const ActionRow& row = g.rows[s][0];
            ParametricMdp::Row out;
            out.action = row.action;
            out.cost = PolynomialExpr::constant(rational_from_double(row.cost));
            for (const auto& [succ, p] : row.successors)
                out.successors.emplace_back(succ, PolynomialExpr::constant(p));
            m.rows[s].push_back(std::move(out));
            continue;
        }
        const std::size_t count = block->actions.size();
        std::vector<PolynomialExpr> f(count);
        PolynomialExpr remainder = PolynomialExpr::constant(Rational(1));
        for (std::size_t i = 0; i + 1 < count; ++i) {
            f[i] = PolynomialExpr::variable(block->parameters[i]);
            remainder = remainder - f[i];
        }
        f[count - 1] = remainder;

        ParametricMdp::Row out;
        out.action = bot_action;
        std::map<int, PolynomialExpr> mix;
        for (std::size_t i = 0; i < count; ++i) {
            const ActionRow* row = g.find_row(s, block->actions[i]);
            if (row == nullptr)
                throw InternalError("observation block action missing at state '" +
                                    g.state_names[s] + "'");
            out.cost += f[i].scaled(rational_from_double(row->cost));
            for (const auto& [succ, p] : row->successors) mix[succ] += f[i].scaled(p);
        }
        for (auto& [succ, expr] : mix)
            if (!(expr == PolynomialExpr()))
                out.successors.emplace_back(succ, std::move(expr));
        m.rows[s].push_back(std::move(out));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

namespace {
constexpr double kWellDefinedTol = 1e-9;

std::vector<Rational> rational_values(const ParametricMdp& pmdp, const Instantiation& u) {
    if (static_cast<int>(u.values.size()) != pmdp.num_parameters())
        throw InstantiationError("instantiation has " + std::to_string(u.values.size()) +
                                 " values for " + std::to_string(pmdp.num_parameters()) +
                                 " parameters");
    std::vector<Rational> vals;
    vals.reserve(u.values.size());
    for (double v : u.values) vals.push_back(rational_from_double(v));
    return vals;
}
}  // namespace

std::vector<std::string> well_definedness_issues(const ParametricMdp& pmdp, const Instantiation& u) {
    std::vector<std::string> issues;
    auto vals = rational_values(pmdp, u);
    for (int s = 0; s < pmdp.num_states(); ++s) {
        for (const auto& row : pmdp.rows[s]) {
            Rational sum = 0;
            for (const auto& [succ, expr] : row.successors) {
                Rational p = expr.evaluate(vals);
                double pd = to_double(p);
                if (pd < -kWellDefinedTol || pd > 1.0 + kWellDefinedTol)
                    issues.push_back("P('" + pmdp.state_names[s] + "' -> '" +
                                     pmdp.state_names[succ] + "') = " + std::to_string(pd));
                sum += p;
            }
            double sd = to_double(sum);
            if (std::abs(sd - 1.0) > kWellDefinedTol)
                issues.push_back("row sum at state '" + pmdp.state_names[s] + "' is " +
                                 std::to_string(sd));
        }
    }
    return issues;
}

OneSidedPosg instantiate(const ParametricMdp& pmdp, const Instantiation& u) {
    auto issues = well_definedness_issues(pmdp, u);
    if (!issues.empty()) {
        std::string msg = "ill-defined instantiation:";
        for (const auto& i : issues) msg += "\n  " + i;
        throw InstantiationError(msg);
    }
    auto vals = rational_values(pmdp, u);

    OneSidedPosg out;
    out.game.state_names = pmdp.state_names;
    out.game.player = pmdp.player;
    out.game.action_names = pmdp.action_names;
    out.game.initial = pmdp.initial;
    out.game.discount = pmdp.discount;
    out.observation_names = pmdp.observation_names;
    out.obs_of = pmdp.obs_of;
    out.is_target = pmdp.is_target;
    out.game.rows.assign(pmdp.num_states(), {});
    for (int s = 0; s < pmdp.num_states(); ++s) {
        for (const auto& row : pmdp.rows[s]) {
            ActionRow r;
            r.action = row.action;
            r.cost = to_double(row.cost.evaluate(vals));
            for (const auto& [succ, expr] : row.successors) {
                Rational p = expr.evaluate(vals);
                if (p == 0) continue;  // exact-zero mixtures drop out
                r.successors.emplace_back(succ, std::move(p));
            }
            out.game.rows[s].push_back(std::move(r));
        }
    }
    return out;
}

InfiltratorStrategy istrat(const ParametricMdp& pmdp, const Instantiation& u) {
    auto issues = well_definedness_issues(pmdp, u);
    if (!issues.empty()) throw InstantiationError("ill-defined instantiation: " + issues.front());

    InfiltratorStrategy s;
    s.memory_nodes = 1;
    s.rows.assign(pmdp.observation_names.size(), {});
    // Single-action observations: probability 1 on the lone action.
    for (int st = 0; st < pmdp.num_states(); ++st) {
        if (pmdp.player[st] == Player::Deceiver) continue;
        int z = pmdp.obs_of[st];
        if (z < 0 || !s.rows[z].empty()) continue;
        if (pmdp.block_for(z) == nullptr) s.rows[z] = {{pmdp.rows[st][0].action, 1.0}};
    }
    for (const auto& block : pmdp.blocks) {
        double rest = 1.0;
        std::vector<std::pair<int, double>> row;
        for (std::size_t i = 0; i + 1 < block.actions.size(); ++i) {
            double p = u.values[block.parameters[i]];
            row.emplace_back(block.actions[i], p);
            rest -= p;
        }
        row.emplace_back(block.actions.back(), rest);
        std::sort(row.begin(), row.end());
        s.rows[block.observation] = std::move(row);
    }
    return s;
}

}  // namespace decgame

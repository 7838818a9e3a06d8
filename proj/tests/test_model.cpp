#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "decgame/json_io.hpp"
#include "decgame/validate.hpp"
#include "test_support.hpp"

using namespace decgame;
using namespace decgame::testing;

namespace {
bool has_code(const std::vector<Violation>& report, const std::string& code) {
    return std::any_of(report.begin(), report.end(),
                       [&code](const Violation& v) { return v.code == code; });
}
}  // namespace

TEST_CASE("worked example game validates cleanly") {
    CHECK(validate(fig4_game()).empty());
}

TEST_CASE("unnormalized distribution is reported") {
    OneSidedPosg posg = fig4_game();
    posg.game.rows[0][0].successors = {{5, Rational(9, 10)}};  // sums to 0.9
    auto report = validate(posg);
    REQUIRE(!report.empty());
    CHECK(has_code(report, "distribution-not-normalized"));
}

TEST_CASE("same-side edge breaks alternation") {
    OneSidedPosg posg = fig4_game();
    posg.game.rows[2][0].successors = {{4, Rational(1)}};  // deceiver -> deceiver
    auto report = validate(posg);
    CHECK(has_code(report, "bipartite-alternation"));
}

TEST_CASE("deadlocks, bad discount, missing observation") {
    OneSidedPosg posg = fig4_game();
    posg.game.rows[1].clear();
    posg.game.discount = 1.0;
    posg.obs_of[3] = -1;
    auto report = validate(posg);
    CHECK(has_code(report, "deadlock"));
    CHECK(has_code(report, "bad-discount"));
    CHECK(has_code(report, "missing-observation"));
}

TEST_CASE("shared observation requires equal action sets") {
    OneSidedPosg posg = fig4_game();
    posg.game.rows[3].pop_back();  // s3 loses a2 while s1 keeps it
    auto report = validate(posg);
    CHECK(has_code(report, "observation-action-mismatch"));
}

TEST_CASE("model JSON round trip preserves structure and probabilities") {
    OneSidedPosg posg = random_game(99);
    std::string text = posg_to_json(posg);
    OneSidedPosg again = posg_from_json(text);
    CHECK(again.game.state_names == posg.game.state_names);
    CHECK(again.game.action_names == posg.game.action_names);
    CHECK(again.observation_names == posg.observation_names);
    CHECK(again.obs_of == posg.obs_of);
    CHECK(again.game.initial == posg.game.initial);
    CHECK(again.game.discount == posg.game.discount);
    REQUIRE(again.game.rows.size() == posg.game.rows.size());
    for (int s = 0; s < posg.game.num_states(); ++s) {
        REQUIRE(again.game.rows[s].size() == posg.game.rows[s].size());
        for (std::size_t r = 0; r < posg.game.rows[s].size(); ++r) {
            const auto& a = posg.game.rows[s][r];
            const auto& b = again.game.rows[s][r];
            CHECK(a.action == b.action);
            CHECK(a.cost == b.cost);
            REQUIRE(a.successors.size() == b.successors.size());
            for (std::size_t i = 0; i < a.successors.size(); ++i) {
                CHECK(a.successors[i].first == b.successors[i].first);
                CHECK(a.successors[i].second == b.successors[i].second);  // exact rationals
            }
        }
    }
    // Serialization is deterministic.
    CHECK(posg_to_json(again) == text);
}

TEST_CASE("random games are valid across seeds") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        CHECK(validate(random_game(seed)).empty());
        RandomGameOptions acyclic;
        acyclic.acyclic = true;
        CHECK(validate(random_game(seed, acyclic)).empty());
    }
}

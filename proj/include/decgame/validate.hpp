#pragma once

#include <string>
#include <vector>

#include "decgame/model.hpp"

namespace decgame {

/// One broken invariant, with enough location detail to find it.
struct Violation {
    std::string code;     // e.g. "distribution-not-normalized"
    std::string message;  // human readable, names the state/action involved
};

/// Checks every structural invariant of the model and reports all
/// violations. An empty report means the model is valid. Violations are
/// data, not exceptions.
std::vector<Violation> validate(const OneSidedPosg& posg);

/// Throws ModelError when validate() is non-empty. Used by operations whose
/// precondition is a valid model.
void require_valid(const OneSidedPosg& posg);

std::string format_violations(const std::vector<Violation>& violations);

}  // namespace decgame

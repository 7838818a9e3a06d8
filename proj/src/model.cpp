#include "decgame/model.hpp"

namespace decgame {

namespace {
int index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw DomainError(std::string("unknown ") + what + " '" + name + "'");
}
}  // namespace

int StochasticGame::state_index(const std::string& name) const {
    return index_of(state_names, name, "state");
}

int StochasticGame::action_index(const std::string& name) const {
    return index_of(action_names, name, "action");
}

int OneSidedPosg::observation_index(const std::string& name) const {
    return index_of(observation_names, name, "observation");
}

}  // namespace decgame

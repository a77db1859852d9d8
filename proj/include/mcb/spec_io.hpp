#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcb/chain.hpp"
#include "mcb/expfamily.hpp"

namespace mcb {

struct SecondChainSpec {
    TransitionMatrix w;
    Vec initial;
};

// On-disk chain description. matrix[i][j] = W(state_i | state_j), i.e. the
// matrix is column-stochastic: matrix[0][1] is the probability of moving
// from state 1 to state 0. initial defaults to the stationary distribution,
// generator.h to all zeros.
struct ChainSpec {
    std::vector<std::string> states;
    TransitionMatrix w;
    Vec initial;
    std::optional<GeneratorSpec> gen;
    std::optional<SecondChainSpec> second;
};

ChainSpec load_spec(const nlohmann::json& j);
nlohmann::json save_spec(const ChainSpec& spec);
ChainSpec load_spec_file(const std::string& path);

}  // namespace mcb

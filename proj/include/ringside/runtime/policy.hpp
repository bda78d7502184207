#pragma once

#include <cstdint>

#include "ringside/arena/config.hpp"
#include "ringside/arena/types.hpp"

namespace ringside::runtime {

// A match-scoped controller for one side. Any method may throw PolicyFault,
// which forfeits the match for that side.
class Policy {
public:
    virtual ~Policy() = default;

    virtual void start(arena::Team side, const arena::EnvConfig& config, std::uint64_t match_seed) = 0;

    // Raw action; the arena clamps it.
    virtual arena::Action act(const arena::Observation& observation) = 0;

    virtual void finish() {}
};

}  // namespace ringside::runtime

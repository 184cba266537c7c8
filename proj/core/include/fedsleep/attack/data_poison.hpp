#pragma once

#include <cstddef>

#include "fedsleep/agent/replay_buffer.hpp"

namespace fedsleep::attack {

/// Negates the highest positive rewards in `buffer` until round(fraction *
/// size) records carry the poisoned mark. Records poisoned earlier count
/// toward the quota, so repeated calls keep the poisoned share at `fraction`.
/// Ties in reward go to the older record. Returns the number of records
/// changed by this call; zero when no positive reward is left.
std::size_t poison_replay(agent::ReplayBuffer& buffer, double fraction);

}  // namespace fedsleep::attack

#include "fedsleep/attack/data_poison.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedsleep/common/error.hpp"

namespace fedsleep::attack {

std::size_t poison_replay(agent::ReplayBuffer& buffer, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DomainError("poison fraction must lie in [0, 1]");
  const auto quota = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(buffer.size())));
  const std::size_t already = buffer.poisoned_count();
  if (quota <= already) return 0;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    if (!buffer.poisoned(i) && buffer.at(i).r > 0.0) candidates.push_back(i);
  }
  const std::size_t take = std::min(quota - already, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ra = buffer.at(a).r, rb = buffer.at(b).r;
                      return ra != rb ? ra > rb : a < b;
                    });
  for (std::size_t k = 0; k < take; ++k) {
    auto& t = buffer.at(candidates[k]);
    t.r = -t.r;
    buffer.set_poisoned(candidates[k]);
  }
  return take;
}

}  // namespace fedsleep::attack

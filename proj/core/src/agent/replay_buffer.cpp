#include "fedsleep/agent/replay_buffer.hpp"

#include <numeric>
#include <string>

#include "fedsleep/common/error.hpp"

namespace fedsleep::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : slots_(capacity), poisoned_(capacity, 0) {
  if (capacity == 0) throw DomainError("replay buffer capacity must be positive");
}

std::size_t ReplayBuffer::physical(std::size_t i) const {
  if (i >= size_) {
    throw std::out_of_range("replay index " + std::to_string(i) + " >= size " + std::to_string(size_));
  }
  return (head_ + i) % slots_.size();
}

void ReplayBuffer::push(Transition t) {
  const std::size_t cap = slots_.size();
  if (size_ < cap) {
    const std::size_t p = (head_ + size_) % cap;
    slots_[p] = std::move(t);
    poisoned_[p] = 0;
    ++size_;
  } else {
    slots_[head_] = std::move(t);
    poisoned_[head_] = 0;
    head_ = (head_ + 1) % cap;
  }
}

void ReplayBuffer::clear() {
  head_ = 0;
  size_ = 0;
  std::fill(poisoned_.begin(), poisoned_.end(), 0);
}

const Transition& ReplayBuffer::at(std::size_t i) const { return slots_[physical(i)]; }
Transition& ReplayBuffer::at(std::size_t i) { return slots_[physical(i)]; }

bool ReplayBuffer::poisoned(std::size_t i) const { return poisoned_[physical(i)] != 0; }
void ReplayBuffer::set_poisoned(std::size_t i, bool value) { poisoned_[physical(i)] = value ? 1 : 0; }

std::size_t ReplayBuffer::poisoned_count() const {
  std::size_t c = 0;
  for (std::size_t i = 0; i < size_; ++i) c += poisoned(i) ? 1 : 0;
  return c;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  std::vector<std::size_t> idx(size_);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t k = std::min(batch, size_);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, size_ - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace fedsleep::agent

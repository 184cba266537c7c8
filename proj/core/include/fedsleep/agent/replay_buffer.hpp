#pragma once

#include <cstddef>
#include <vector>

#include "fedsleep/common/rng.hpp"

namespace fedsleep::agent {

struct Transition {
  std::vector<double> s;
  int a = 0;
  double r = 0.0;
  std::vector<double> s_next;
};

/// Fixed-capacity FIFO of transitions. Index 0 is always the oldest record.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return slots_.size(); }
  bool empty() const { return size_ == 0; }

  /// Appends, evicting the oldest record when full.
  void push(Transition t);
  void clear();

  const Transition& at(std::size_t i) const;
  Transition& at(std::size_t i);

  /// Marks records an attacker has already tampered with.
  bool poisoned(std::size_t i) const;
  void set_poisoned(std::size_t i, bool value = true);
  std::size_t poisoned_count() const;

  /// min(batch, size) distinct indices, uniformly without replacement.
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

 private:
  std::size_t physical(std::size_t i) const;

  std::vector<Transition> slots_;
  std::vector<char> poisoned_;
  std::size_t head_ = 0;  // physical index of the oldest record
  std::size_t size_ = 0;
};

}  // namespace fedsleep::agent

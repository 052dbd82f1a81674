#include "modalctl/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace modalctl {

StateVector::StateVector(std::initializer_list<std::pair<const std::size_t, double>> init) {
  for (const auto& [index, value] : init) {
    set(index, value);
  }
}

StateVector StateVector::unit(std::size_t index, double value) {
  StateVector x;
  x.set(index, value);
  return x;
}

void StateVector::set(std::size_t index, double value) {
  if (value == 0.0) {
    entries_.erase(index);
  } else {
    entries_[index] = value;
  }
}

double StateVector::at(std::size_t index) const {
  const auto it = entries_.find(index);
  return it == entries_.end() ? 0.0 : it->second;
}

std::size_t StateVector::max_index() const {
  return entries_.empty() ? 0 : entries_.rbegin()->first;
}

std::size_t StateVector::max_block() const { return max_index() / 2; }

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& [index, value] : entries_) {
    sum += value * value;
  }
  return std::sqrt(sum);
}

StateVector StateVector::project(std::size_t truncation) const {
  const std::size_t cutoff = 2 * truncation + 1;
  StateVector out;
  for (const auto& [index, value] : entries_) {
    if (index > cutoff) break;
    out.entries_[index] = value;
  }
  return out;
}

StateVector StateVector::complement(std::size_t truncation) const {
  const std::size_t cutoff = 2 * truncation + 1;
  StateVector out;
  for (auto it = entries_.upper_bound(cutoff); it != entries_.end(); ++it) {
    out.entries_[it->first] = it->second;
  }
  return out;
}

StateVector& StateVector::operator+=(const StateVector& rhs) {
  for (const auto& [index, value] : rhs.entries_) {
    set(index, at(index) + value);
  }
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& rhs) {
  for (const auto& [index, value] : rhs.entries_) {
    set(index, at(index) - value);
  }
  return *this;
}

StateVector& StateVector::operator*=(double scale) {
  if (scale == 0.0) {
    entries_.clear();
    return *this;
  }
  for (auto& [index, value] : entries_) {
    value *= scale;
  }
  return *this;
}

std::vector<double> StateVector::to_dense(std::size_t dim) const {
  if (!entries_.empty() && max_index() >= dim) {
    throw std::invalid_argument("StateVector::to_dense: support exceeds requested dimension");
  }
  std::vector<double> dense(dim, 0.0);
  for (const auto& [index, value] : entries_) {
    dense[index] = value;
  }
  return dense;
}

StateVector StateVector::from_dense(const std::vector<double>& dense) {
  StateVector out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    out.set(i, dense[i]);
  }
  return out;
}

}  // namespace modalctl

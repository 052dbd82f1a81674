#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <utility>
#include <vector>

namespace modalctl {

/// Finite-support element of l^2. Index 2n is the position component xi_n of
/// block n, index 2n+1 the velocity component eta_n. Exact zeros are not
/// stored, so support queries and equality are canonical.
class StateVector {
 public:
  using Entries = std::map<std::size_t, double>;

  StateVector() = default;
  StateVector(std::initializer_list<std::pair<const std::size_t, double>> init);

  static StateVector unit(std::size_t index, double value = 1.0);

  void set(std::size_t index, double value);
  double at(std::size_t index) const;

  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  /// Largest populated index; 0 for the zero vector.
  std::size_t max_index() const;
  /// Block of the largest populated index (max_index()/2); 0 for zero vector.
  std::size_t max_block() const;

  /// l^2 norm, summed in ascending index order.
  double norm() const;

  /// P_N x: entries with index <= 2N+1.
  StateVector project(std::size_t truncation) const;
  /// Q_N x = x - P_N x: entries with index > 2N+1.
  StateVector complement(std::size_t truncation) const;

  StateVector& operator+=(const StateVector& rhs);
  StateVector& operator-=(const StateVector& rhs);
  StateVector& operator*=(double scale);

  friend StateVector operator+(StateVector lhs, const StateVector& rhs) { return lhs += rhs; }
  friend StateVector operator-(StateVector lhs, const StateVector& rhs) { return lhs -= rhs; }
  friend bool operator==(const StateVector& a, const StateVector& b) { return a.entries_ == b.entries_; }

  /// Dense copy of indices [0, dim); entries beyond dim must not exist.
  std::vector<double> to_dense(std::size_t dim) const;
  static StateVector from_dense(const std::vector<double>& dense);

 private:
  Entries entries_;
};

}  // namespace modalctl

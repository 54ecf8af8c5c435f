#pragma once

#include <compare>
#include <limits>
#include <stdexcept>

namespace sinkdir {

/// A route cost that is either a finite non-negative value or "unreached".
/// Unreached orders above every finite cost. Reading the value of an
/// unreached cost throws, so infinity never leaks into arithmetic or output.
class RouteCost {
 public:
  constexpr RouteCost() = default;

  static constexpr RouteCost unreached() { return RouteCost{}; }
  static constexpr RouteCost of(double value) { return RouteCost{value}; }

  constexpr bool reached() const { return raw_ != std::numeric_limits<double>::infinity(); }

  double value() const {
    if (!reached()) throw std::logic_error("value() of an unreached route cost");
    return raw_;
  }

  /// Value with unreached mapped to +infinity, for threshold comparisons only.
  constexpr double or_infinity() const { return raw_; }

  friend constexpr bool operator==(RouteCost, RouteCost) = default;
  friend constexpr std::partial_ordering operator<=>(RouteCost a, RouteCost b) {
    return a.raw_ <=> b.raw_;
  }

 private:
  constexpr explicit RouteCost(double v) : raw_(v) {}
  double raw_ = std::numeric_limits<double>::infinity();
};

}  // namespace sinkdir

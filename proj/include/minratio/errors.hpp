#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace minratio {

// Bad input to an operation: non-positive rate, repeated index, malformed grid.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested combinatorial object does not exist (e.g. m > n).
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Instance is larger than an exact solver's state cap.
class CapacityError : public std::length_error {
 public:
  CapacityError(std::size_t n, std::size_t cap)
      : std::length_error("instance has " + std::to_string(n) +
                          " points, exact solver cap is " + std::to_string(cap) +
                          "; use a heuristic solver"),
        n_(n),
        cap_(cap) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t n_;
  std::size_t cap_;
};

class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace minratio

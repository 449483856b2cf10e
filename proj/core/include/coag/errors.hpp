#pragma once

#include <stdexcept>
#include <string>

namespace coag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Profile shooting or normalization failed.
class ProfileError : public Error {
 public:
  using Error::Error;
};

// The index window of a fibre (or the grid domain) is too small for the data.
class WindowError : public Error {
 public:
  WindowError(const std::string& what, int required_k_min, int required_k_max)
      : Error(what), required_k_min_(required_k_min), required_k_max_(required_k_max) {}

  int required_k_min() const noexcept { return required_k_min_; }
  int required_k_max() const noexcept { return required_k_max_; }

 private:
  int required_k_min_;
  int required_k_max_;
};

// A time step produced values outside the a priori bounds.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace coag

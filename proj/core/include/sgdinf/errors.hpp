#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sgdinf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated construction invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

/// A scale (variance entry or scaling matrix) is zero, negative or singular.
class DegenerateScale : public Error {
 public:
  using Error::Error;
};

/// Requested an estimate before any iterate was retained.
class NoEstimate : public Error {
 public:
  using Error::Error;
};

/// The SGD path produced a non-finite value at iteration `t`.
class Divergence : public Error {
 public:
  explicit Divergence(std::uint64_t t, const std::string& detail = {})
      : Error("SGD diverged at t=" + std::to_string(t) +
              (detail.empty() ? std::string{} : ": " + detail)),
        t_(t) {}

  std::uint64_t iteration() const noexcept { return t_; }

 private:
  std::uint64_t t_;
};

}  // namespace sgdinf

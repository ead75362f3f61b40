#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmink {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Curvature radius dropped below the convexity floor at `index`.
class ConvexityLoss : public Error {
 public:
  ConvexityLoss(std::size_t index, double radius)
      : Error("convexity lost at grid index " + std::to_string(index) +
              " (curvature radius " + std::to_string(radius) + ")"),
        index_(index),
        radius_(radius) {}

  std::size_t index() const noexcept { return index_; }
  double radius() const noexcept { return radius_; }

 private:
  std::size_t index_;
  double radius_;
};

class CollarFailure : public Error {
 public:
  using Error::Error;
};

class InvalidMesh : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class DegenerateGradient : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmink

#pragma once

#include <stdexcept>
#include <string>

namespace hjrd {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed specification of a grid, box, model, or solver configuration.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Index outside the valid node range.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Query point contains NaN or infinity.
class NonFinitePoint : public Error {
 public:
  using Error::Error;
};

// Dimension counts disagree between two objects that must match.
class DimMismatch : public Error {
 public:
  using Error::Error;
};

// Two fields/grids that must share a layout do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// A field holds NaN or infinity where finite values are required.
class NonFiniteField : public Error {
 public:
  using Error::Error;
};

// Dissipation bounds vanish in every dimension; no time step exists.
class AllZeroDynamics : public Error {
 public:
  using Error::Error;
};

// Integration needed more steps than the configured cap.
class StepCapExceeded : public Error {
 public:
  using Error::Error;
};

// Query point lies outside the non-periodic extent of a grid.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

// A target set cannot be expressed in the requested decomposition.
class UncoverableTarget : public Error {
 public:
  using Error::Error;
};

// Work estimate exceeds the configured exhaustive-search budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Bad command-line or config-file input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hjrd

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evreg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter is outside the support of the density or formula.
struct DomainError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// Cholesky met a pivot <= 1e-300.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct NonFiniteLoss : Error {
  NonFiniteLoss(std::size_t epoch, const std::string& what)
      : Error(what), epoch(epoch) {}
  std::size_t epoch;
};

struct FitDiverged : Error {
  using Error::Error;
};

}  // namespace evreg

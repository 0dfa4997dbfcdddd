#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jampa {

enum class ErrorKind {
  InvalidInput,
  NoMinimum,
  ExpansionFailure,
  NoPositiveLength,
  FrequencyAbovePlasma,
  SolverFailure,
  DegenerateNullspace,
  InsufficientData,
  NegativeGain,
  NonphysicalResult,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NoMinimum: return "NoMinimum";
    case ErrorKind::ExpansionFailure: return "ExpansionFailure";
    case ErrorKind::NoPositiveLength: return "NoPositiveLength";
    case ErrorKind::FrequencyAbovePlasma: return "FrequencyAbovePlasma";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::DegenerateNullspace: return "DegenerateNullspace";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NegativeGain: return "NegativeGain";
    case ErrorKind::NonphysicalResult: return "NonphysicalResult";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jampa

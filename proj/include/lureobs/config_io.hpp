#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "lureobs/observer_design.hpp"
#include "lureobs/simulate.hpp"

namespace lureobs {

/// Raised on malformed configuration input (missing keys, bad matrix
/// literals, unknown function names, dimension mismatches in files).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// System file contents: the system itself, declared constants, and optional
/// initial conditions. Format is line-based `key = value` with `#` comments;
/// matrices are written `[a b; c d]` (rows separated by `;`), nonlinearities
/// are referenced by registered name.
struct ParsedSystem {
  LureSystem sys;
  LipschitzBounds bounds;
  std::optional<Vec> x0, xhat0, zhat0;
};

/// Gains file contents: either full-order (P, L, K, beta, epsilon) or
/// reduced-order (q, Q, P21, P22, epsilon).
struct ParsedGains {
  std::optional<ObserverGains> full;
  std::optional<ReducedGains> reduced;
  int q = 0;  // reduced only
};

ParsedSystem parse_system_file(const std::string& path);
ParsedGains parse_gains_file(const std::string& path);

/// Parses "exact", "sigmoid:EPS:abs|sqrt", or "guided:K1:K2:M:N".
SignMode parse_sign_mode(const std::string& text);

/// Registered nonlinearities available to system files. Unknown names raise
/// ConfigError listing the known set.
StateFn registry_f1(const std::string& name, const SystemDims& dims);
MatrixFn registry_f2(const std::string& name, const SystemDims& dims);
ThetaFn registry_theta(const std::string& name, const SystemDims& dims);
InputFn registry_input(const std::string& name, const SystemDims& dims);

}  // namespace lureobs

#pragma once

#include <string>
#include <string_view>

namespace wshart {

enum class PrecisionMode { standard, extended };

/// Arithmetic mode plus the accuracy the caller asks for. `standard` is IEEE
/// double (15 certified digits); `extended` is double-double (31 digits).
struct PrecisionContext {
  PrecisionMode mode = PrecisionMode::standard;
  int decimal_digits = 15;
  double tolerance = 1e-15;

  static PrecisionContext standard() { return {PrecisionMode::standard, 15, 1e-15}; }
  static PrecisionContext extended() { return {PrecisionMode::extended, 30, 1e-30}; }
  static PrecisionContext for_mode(PrecisionMode m) {
    return m == PrecisionMode::extended ? extended() : standard();
  }

  /// Digits the arithmetic of `mode` can carry.
  int capacity_digits() const { return mode == PrecisionMode::extended ? 31 : 15; }

  /// Throws DomainError on malformed fields, PrecisionError when the digit
  /// target exceeds what the mode can deliver.
  void validate() const;
};

std::string to_string(PrecisionMode m);
/// Accepts "standard" or "extended"; throws DomainError otherwise.
PrecisionMode parse_precision_mode(std::string_view s);

}  // namespace wshart

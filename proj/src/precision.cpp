#include "wshart/precision.hpp"

#include <string>

#include "wshart/errors.hpp"

namespace wshart {

void PrecisionContext::validate() const {
  if (decimal_digits < 15) {
    throw DomainError("decimal_digits must be >= 15, got " + std::to_string(decimal_digits));
  }
  if (!(tolerance > 0.0 && tolerance <= 1e-10)) {
    throw DomainError("tolerance must lie in (0, 1e-10]");
  }
  if (decimal_digits > capacity_digits()) {
    throw PrecisionError("requested " + std::to_string(decimal_digits) + " digits but " +
                         to_string(mode) + " precision certifies at most " +
                         std::to_string(capacity_digits()));
  }
}

std::string to_string(PrecisionMode m) {
  return m == PrecisionMode::extended ? "extended" : "standard";
}

PrecisionMode parse_precision_mode(std::string_view s) {
  if (s == "standard") return PrecisionMode::standard;
  if (s == "extended") return PrecisionMode::extended;
  throw DomainError("precision must be 'standard' or 'extended', got '" + std::string(s) + "'");
}

}  // namespace wshart

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gvmf {

/// The three generalized von Mises-Fisher families.
///   I     : exp((kappa/alpha) * signed_pow(mu'x, alpha))
///   II    : exp(-(kappa/(2^alpha alpha)) * |x - mu|^(2 alpha))
///   Axial : exp((kappa/alpha) * |mu'x|^alpha)
enum class Family { I, II, Axial };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::I: return "I";
    case Family::II: return "II";
    case Family::Axial: return "Axial";
  }
  return "?";
}

/// Accepts "I", "II", "Axial" and the numeric aliases "1", "2", "3".
inline std::optional<Family> parse_family(std::string_view s) {
  if (s == "I" || s == "1" || s == "i") return Family::I;
  if (s == "II" || s == "2" || s == "ii") return Family::II;
  if (s == "Axial" || s == "axial" || s == "3" || s == "III") return Family::Axial;
  return std::nullopt;
}

}  // namespace gvmf

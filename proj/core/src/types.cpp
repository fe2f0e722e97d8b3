#include "rowsim/types.hpp"

#include <charconv>

namespace rowsim {

std::string_view to_string(Sidedness s) {
  return s == Sidedness::Single ? "single" : "double";
}

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Hammer: return "hammer";
    case Mechanism::Press: return "press";
    case Mechanism::Retention: return "retention";
  }
  return "unknown";
}

std::string_view to_string(FlipDirection d) {
  return d == FlipDirection::OneToZero ? "1->0" : "0->1";
}

Sidedness parse_sidedness(std::string_view text) {
  if (text == "single") return Sidedness::Single;
  if (text == "double") return Sidedness::Double;
  throw ConfigError("unknown sidedness '" + std::string(text) + "' (expected single or double)");
}

std::string format_real(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace rowsim

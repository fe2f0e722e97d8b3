#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rowsim {

/// All simulated time is kept in integer nanoseconds since simulation start.
using Nanos = std::chrono::nanoseconds;
using RowIndex = std::uint32_t;

/// Temperature in degrees Celsius. Profiles only carry curves at integer temperatures.
struct Celsius {
  int value = 50;

  constexpr auto operator<=>(const Celsius&) const = default;
};

enum class Sidedness : std::uint8_t { Single, Double };

/// Read-disturb failure mechanism that produced (or can produce) a bitflip.
enum class Mechanism : std::uint8_t { Hammer, Press, Retention };

enum class FlipDirection : std::uint8_t { ZeroToOne, OneToZero };

std::string_view to_string(Sidedness s);
std::string_view to_string(Mechanism m);
std::string_view to_string(FlipDirection d);

Sidedness parse_sidedness(std::string_view text);

/// Shortest text that reads back as the same double. Used for every CSV number.
std::string format_real(double v);

/// Bit value a cell must hold for a flip in direction `d` to be observable.
constexpr std::uint8_t source_bit(FlipDirection d) {
  return d == FlipDirection::OneToZero ? 1 : 0;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A command violates a timing rule that the simulation was asked to enforce.
class TimingViolation : public Error {
 public:
  using Error::Error;
};

/// A command was issued in the wrong bank state (wrong row, no open row, time going backwards).
class StateError : public Error {
 public:
  using Error::Error;
};

class ProfileError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration (experiment spec, mitigation parameters, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rowsim

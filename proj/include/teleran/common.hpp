#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace teleran {

// Raised when a caller breaks an operation's precondition. Treated as fatal by
// the harness; tests catch it to exercise the error paths.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised for malformed input files and configuration.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* what) {
  if (!condition) throw ContractViolation(what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

using VehicleId = std::uint32_t;

// Simulation time in integer microseconds.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
  static constexpr SimTime from_millis(std::int64_t ms) { return SimTime(ms * 1000); }
  static SimTime from_seconds(double s) { return SimTime(std::llround(s * 1e6)); }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) * 1e-6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime other) const { return SimTime(us_ + other.us_); }
  constexpr SimTime operator-(SimTime other) const { return SimTime(us_ - other.us_); }
  constexpr SimTime& operator+=(SimTime other) {
    us_ += other.us_;
    return *this;
  }

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

}  // namespace teleran

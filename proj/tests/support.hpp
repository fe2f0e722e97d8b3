#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "rowsim/bank.hpp"
#include "rowsim/profile.hpp"

namespace rowsim::support {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Dec50 = boost::multiprecision::cpp_dec_float_50;

/// Exact value of a double.
inline Rational exact(double v) { return Rational(v); }

inline BigInt ceil_div(const Rational& r) {
  const BigInt n = boost::multiprecision::numerator(r);
  const BigInt d = boost::multiprecision::denominator(r);
  BigInt q = n / d;
  if (q * d < n) ++q;
  return q;
}

inline const device::DeviceProfile& builtin(const std::string& name) {
  const auto* p = device::find_builtin(name);
  if (!p) throw std::runtime_error("missing builtin " + name);
  return *p;
}

/// Same curves, every row at `factor`.
inline device::DeviceProfile pinned(device::DeviceProfile p, double factor = 1.0) {
  p.row_variation.min_factor = p.row_variation.max_factor = factor;
  p.name += "-pinned";
  p.validate();
  return p;
}

inline dram::BankConfig quiet_bank(RowIndex rows, int temp_c) {
  dram::BankConfig c;
  c.rows = rows;
  c.temp_c = temp_c;
  c.record_events = false;
  return c;
}

inline dram::Command act(RowIndex r, long long t) { return {dram::CommandKind::Activate, r, Nanos{t}}; }
inline dram::Command pre(long long t) { return {dram::CommandKind::Precharge, dram::kNoRow, Nanos{t}}; }

}  // namespace rowsim::support

#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace convlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parses "a" or "a/b".
Rational rational_from_string(const std::string& text);
std::string rational_to_string(const Rational& q);

}  // namespace convlab

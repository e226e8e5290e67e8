#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace derham {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// q^e with integer e (e < 0 requires q != 0).
inline Rational rational_pow(const Rational& q, long e) {
    if (e == 0) return Rational(1);
    if (q == 0) {
        if (e > 0) return Rational(0);
        throw std::domain_error("rational_pow: zero base, negative exponent");
    }
    Rational base = e > 0 ? q : Rational(1) / q;
    unsigned long n = e > 0 ? static_cast<unsigned long>(e) : static_cast<unsigned long>(-e);
    Rational acc(1);
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace derham

#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ewgeom {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class TensorError : public Error {
  public:
    explicit TensorError(const std::string& msg) : Error(msg) {}
};

class SingularInputError : public Error {
  public:
    explicit SingularInputError(const std::string& msg) : Error(msg) {}
};

class OffShellError : public Error {
  public:
    OffShellError(const std::string& msg, double deviation)
        : Error(msg), deviation_(deviation) {}
    double deviation() const { return deviation_; }

  private:
    double deviation_;
};

// Parse failures carry the byte offset of the offending token.
class ParseError : public Error {
  public:
    ParseError(std::size_t offset, const std::string& msg)
        : Error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Exact rational with small integer terms; used for unit-scaling exponents
// and for symbolic vertex coefficients.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw Error("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (num == 0) den = 1;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    friend Rational operator-(Rational a) { return Rational(-a.num, a.den); }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

template <typename... Args>
std::string cat(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}

}  // namespace ewgeom

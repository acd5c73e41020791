#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace calim {

// Exact rational on 64-bit numerator/denominator with 128-bit intermediates.
// All probability bookkeeping in the library goes through this type; an
// operation whose reduced result does not fit 64 bits throws.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        __int128 nn = n, dd = d;
        if (dd < 0) { nn = -nn; dd = -dd; }
        reduce_assign(nn, dd);
    }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return from128(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        long long g1 = std::gcd(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
        long long g2 = std::gcd(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
        __int128 n = (__int128)(a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1));
        __int128 d = (__int128)(a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1));
        return from128(n, d);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return a * Rational(b.den_, b.num_);
    }
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }
    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    double to_double() const { return (double)num_ / (double)den_; }

    // "p/q" (or plain "p" when q == 1)
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(s));
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }

    // a/2^k, handy for dyadic tolerances
    static Rational dyadic(long long a, int k) {
        if (k < 0 || k > 62) throw std::domain_error("Rational::dyadic: bad exponent");
        return Rational(a, 1LL << k);
    }

    static Rational pow(const Rational& base, int e) {
        Rational r(1);
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    }

private:
    static Rational from128(__int128 n, __int128 d) {
        Rational r;
        r.reduce_assign(n, d);
        return r;
    }
    void reduce_assign(__int128 n, __int128 d) {
        if (d < 0) { n = -n; d = -d; }
        __int128 a = n < 0 ? -n : n;
        __int128 b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a == 0) a = 1;
        n /= a; d /= a;
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: 64-bit overflow");
        num_ = (long long)n;
        den_ = (long long)d;
    }

    long long num_;
    long long den_;
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace calim

#include "calim/counter.hpp"

#include <stdexcept>

namespace calim {

CounterDigits CounterDigits::from_string(const std::string& msb_first) {
    CounterDigits c;
    c.digits.reserve(msb_first.size());
    for (auto it = msb_first.rbegin(); it != msb_first.rend(); ++it) {
        if (*it < '0' || *it > '2') throw std::invalid_argument("counter digit out of {0,1,2}");
        c.digits.push_back((uint8_t)(*it - '0'));
    }
    return c;
}

std::string CounterDigits::to_string() const {
    std::string s;
    s.reserve(digits.size());
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) s.push_back((char)('0' + *it));
    return s;
}

long long CounterDigits::value() const {
    long long v = 0;
    if (digits.size() > 62) throw std::overflow_error("counter value above 2^62");
    for (size_t i = digits.size(); i-- > 0;) v = 2 * v + digits[i];
    return v;
}

CounterDigits inc_digits(const CounterDigits& u) {
    // empty counter encodes value 0 and increments to "1"
    if (u.digits.empty()) return CounterDigits{{1}};
    CounterDigits out;
    size_t n = u.digits.size();
    bool extend = u.digits[n - 1] == 2;
    out.digits.resize(n + (extend ? 1 : 0));
    for (size_t i = 0; i < n; ++i) {
        bool carry_in = (i == 0) || u.digits[i - 1] == 2;
        out.digits[i] = (uint8_t)(u.digits[i] % 2 + (carry_in ? 1 : 0));
    }
    if (extend) out.digits[n] = 1;
    return out;
}

Sign compare_sign(const CounterDigits& u, const CounterDigits& v) {
    // pad to equal length with leading (most-significant) zeroes
    size_t n = std::max(u.digits.size(), v.digits.size());
    auto dig = [n](const CounterDigits& c, size_t msb_index) -> int {
        // msb_index 0 = leftmost after padding
        size_t from_low = n - 1 - msb_index;
        if (from_low >= c.digits.size()) return 0;
        return c.digits[from_low];
    };
    int ucar = 0, vcar = 0;  // reduced digits carried into the next position
    for (size_t i = 0; i < n; ++i) {
        int ui = i == 0 ? dig(u, 0) : ucar;
        int vi = i == 0 ? dig(v, 0) : vcar;
        if (i + 1 == n) {
            // Case 1: last digits decide
            if (ui != vi) return ui > vi ? Sign::Plus : Sign::Minus;
            return Sign::Zero;
        }
        int un = dig(u, i + 1), vn = dig(v, i + 1);
        int a = ui + un / 2;
        int b = vi + vn / 2;
        if (a > b) return Sign::Plus;   // Case 2
        if (a < b) return Sign::Minus;  // Case 2, symmetric
        ucar = un % 2;                  // Case 3: recurse with carries reduced
        vcar = vn % 2;
    }
    return Sign::Zero;
}

DecCounter DecCounter::from_value(long long v) {
    if (v < 0) throw std::invalid_argument("DecCounter: negative start");
    DecCounter c;
    while (v > 0) {
        c.digits.push_back((int8_t)(v & 1));
        v >>= 1;
    }
    if (c.digits.empty()) c.digits.push_back(0);
    return c;
}

long long DecCounter::value() const {
    long long v = 0;
    for (size_t i = digits.size(); i-- > 0;) v = 2 * v + digits[i];
    return v;
}

DecCounter dec_digits(const DecCounter& u) {
    // mirror of inc: -1 plays the role of the carry digit 2, and the least
    // significant position receives a perpetual borrow
    DecCounter out;
    size_t n = u.digits.size();
    out.digits.resize(n);
    for (size_t i = 0; i < n; ++i) {
        bool borrow_in = (i == 0) || u.digits[i - 1] == -1;
        int base = u.digits[i] == -1 ? 1 : u.digits[i];
        out.digits[i] = (int8_t)(base - (borrow_in ? 1 : 0));
    }
    return out;
}

}  // namespace calim

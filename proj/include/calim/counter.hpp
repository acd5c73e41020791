#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace calim {

// Redundant binary counter over digits {0,1,2}. Digit 2 acts as a carry in
// transit, which is what makes the increment a radius-1 local pass.
//
// Digits are stored least-significant first; to_string() prints
// most-significant first (the spatial layout next to a wall).
struct CounterDigits {
    std::vector<uint8_t> digits;  // index 0 = least significant

    static CounterDigits from_string(const std::string& msb_first);
    std::string to_string() const;

    // exceeds 2^62 -> throws
    long long value() const;
    int length() const { return (int)digits.size(); }
};

// val(inc(u)) == val(u) + 1; |inc(u)| <= |u| + 1.
CounterDigits inc_digits(const CounterDigits& u);

enum class Sign { Minus = -1, Zero = 0, Plus = 1 };

// Leftmost-first comparison with one-digit carry lookahead. Exact on
// inc-generated counters (the contract domain); arbitrary digit strings are
// outside the contract.
Sign compare_sign(const CounterDigits& u, const CounterDigits& v);

// Decrementing counter over digits {-1,0,1}; -1 is the negative carry.
// Used by the merge layer. Digits least-significant first; value() exact.
struct DecCounter {
    std::vector<int8_t> digits;

    static DecCounter from_value(long long v);  // canonical binary
    long long value() const;
};

// val(dec(u)) == val(u) - 1
DecCounter dec_digits(const DecCounter& u);

}  // namespace calim

#pragma once

#include <cstdint>

namespace calim {

// splitmix64; the project pins this generator so seeded runs are stable
// across platforms and stdlib versions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t below(uint64_t n) {
        // rejection to stay unbiased
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next(); } while (v >= lim);
        return v % n;
    }

    // derive an independent stream, used to partition seeds across rings
    Rng fork(uint64_t index) const {
        Rng r(state_ ^ (0xd1342543de82ef95ULL * (index + 1)));
        r.next();
        return r;
    }

private:
    uint64_t state_;
};

}  // namespace calim

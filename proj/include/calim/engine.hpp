#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "calim/measures.hpp"

namespace calim {

using cell_t = uint64_t;

// Radius-r local rule over symbols 0..alphabet_size-1. Small alphabets get a
// dense table indexed by packed windows; larger ones use a callback. The
// packing function (window -> index, first cell most significant) is part of
// the contract and stable across runs.
class RuleTable {
public:
    static RuleTable dense(int alphabet_size, int radius, std::vector<cell_t> table);
    static RuleTable callback(int alphabet_size, int radius,
                              std::function<cell_t(const cell_t*)> f);
    // elementary CA by Wolfram number (alphabet {0,1}, radius 1)
    static RuleTable elementary(int wolfram);
    static RuleTable identity(int alphabet_size);

    int alphabet_size() const { return alphabet_size_; }
    int radius() const { return radius_; }
    int window() const { return 2 * radius_ + 1; }

    cell_t apply(const cell_t* win) const {
        if (!table_.empty()) {
            uint64_t idx = 0;
            for (int i = 0; i < window_; ++i) idx = idx * alphabet_size_ + win[i];
            return table_[idx];
        }
        return f_(win);
    }

private:
    int alphabet_size_ = 0;
    int radius_ = 0;
    int window_ = 0;
    std::vector<cell_t> table_;
    std::function<cell_t(const cell_t*)> f_;
};

// Cyclic configuration.
struct RingConfig {
    std::vector<cell_t> cells;
    long long t = 0;

    int size() const { return (int)cells.size(); }
};

RingConfig ring_from_string(const std::string& s, const Alphabet& alpha);
std::string ring_to_string(const RingConfig& cfg, const Alphabet& alpha);

RingConfig step(const RuleTable& rule, const RingConfig& cfg);

struct SpaceTimeTrace {
    int width = 0;
    int stride = 1;  // rows kept once per stride when capped
    std::vector<std::vector<cell_t>> rows;
};

// T-fold step; when trace is requested and T*L exceeds cell_cap the trace is
// strided instead of refused.
RingConfig iterate(const RuleTable& rule, RingConfig cfg, long long T, bool trace,
                   SpaceTimeTrace* out_trace, long long cell_cap = 64'000'000);

struct PredecessorSet {
    std::string target;
    int steps = 0;
    std::vector<std::string> members;  // words in A^{|u|+2rt}
};

// Exhaustive t-step predecessor enumeration of the cylinder [u].
PredecessorSet predecessors(const RuleTable& rule, const std::string& u, int t,
                            const Alphabet& alpha, long long budget = 1LL << 24);

// F_*^t mu ([u]) = sum over predecessors of mu([v]), exact.
Rational exact_pushforward(const RuleTable& rule, const MeasureSource& src,
                           const std::string& u, int t, long long budget = 1LL << 24);

// binary P5 image, one row per kept time step, symbol scaled to gray
std::string trace_to_pgm(const SpaceTimeTrace& trace, int alphabet_size);
// P6 with an explicit palette (cell code -> rgb)
std::string trace_to_ppm(const SpaceTimeTrace& trace,
                         const std::function<std::array<uint8_t, 3>(cell_t)>& palette);

}  // namespace calim

#pragma once

#include <array>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "calim/approx.hpp"
#include "calim/counter.hpp"
#include "calim/engine.hpp"
#include "calim/measures.hpp"
#include "calim/turing.hpp"

namespace calim {

// ---------------------------------------------------------------------------
// Layered cells
//
// A cell is Wall, Init, or a composite of six layers:
//   output   letter of B, or blank
//   comp     three Turing sub-layers, each (tape symbol, head state)
//   time     redundant binary digit of the attached time counter
//   sweeping (state, value) of a sweeping counter
//   copy     up to two letters of the copy caterpillar (see module README)
//   merge    (digit of the merging countdown, moving mark)
// Wall and Init carry no layer data. Every composite state round-trips
// through the packed 64-bit encoding below.
// ---------------------------------------------------------------------------

enum : uint8_t {
    KIND_CELL = 0,
    KIND_WALL = 1,
    KIND_INIT = 2,
};

enum : uint8_t {  // sweeping states
    SS_NONE = 0,
    SS_GO = 1,
    SS_STOP = 2,
    SS_PLUS = 3,
    SS_MINUS = 4,
    SS_EQ = 5,
};

enum : uint8_t {  // merge marks
    MM_NONE = 0,
    MM_RIGHT = 1,     // probe heading right
    MM_LEFT = 2,      // probe heading left
    MM_BOTH = 3,
    MM_M = 4,         // merge marker: wall to the left dies at the next T_n
    MM_RET = 5,       // probe returned this step
};

constexpr uint8_t OUT_NONE = 7;   // blank output letter
constexpr uint8_t TD_NONE = 6;    // blank time digit
constexpr uint8_t SV_NONE = 6;    // blank sweep value (Go buffers)
constexpr uint8_t CP_NONE = 7;    // blank copy letter slot
constexpr uint8_t MD_NONE = 7;    // blank merge digit
constexpr uint8_t TAPE_NONE = 7;  // blank comp tape symbol
constexpr uint8_t HEAD_NONE = 31; // no comp head

struct Cell {
    uint8_t kind = KIND_CELL;
    uint8_t out = OUT_NONE;
    uint8_t time = TD_NONE;   // 0,1,2 or TD_NONE
    uint8_t sst = SS_NONE;
    uint8_t sval = SV_NONE;   // 0,1,2 or SV_NONE
    uint8_t cp1 = CP_NONE;    // first copy letter slot
    uint8_t cp2 = CP_NONE;    // second copy letter slot
    uint8_t mdig = MD_NONE;   // 0 -> -1, 1 -> 0, 2 -> +1
    uint8_t mmark = MM_NONE;
    std::array<uint8_t, 3> tape{TAPE_NONE, TAPE_NONE, TAPE_NONE};
    std::array<uint8_t, 3> head{HEAD_NONE, HEAD_NONE, HEAD_NONE};

    bool is_wall() const { return kind == KIND_WALL; }
    bool is_init() const { return kind == KIND_INIT; }
    bool aux_blank() const {
        return time == TD_NONE && sst == SS_NONE && cp1 == CP_NONE && cp2 == CP_NONE &&
               mdig == MD_NONE && mmark == MM_NONE && tape[0] == TAPE_NONE &&
               tape[1] == TAPE_NONE && tape[2] == TAPE_NONE && head[0] == HEAD_NONE &&
               head[1] == HEAD_NONE && head[2] == HEAD_NONE;
    }

    static Cell wall() { Cell c; c.kind = KIND_WALL; return c; }
    static Cell init() { Cell c; c.kind = KIND_INIT; return c; }
    static Cell blank() { return Cell{}; }
    static Cell letter(uint8_t b) { Cell c; c.out = b; return c; }
};

cell_t pack_cell(const Cell& c);
Cell unpack_cell(cell_t v);

// Phase schedule: T(n) = T0 + sum_{k<=n} q^floor(sqrt(k)), K(n) = ceil(sqrt(T(n+1)-T(n))).
struct Schedule {
    int q = 5;
    long long T0 = 2;

    long long delta(long long n) const;  // q^floor(sqrt(n)); overflow guard at 2^62
    long long T(long long n) const;
    long long K(long long n) const;
    // largest n with T(n) <= t (0 when t < T(1))
    long long phase_of(long long t) const;
};

struct SequenceProgramBinding {
    enum class Mode { HostOracle, Faithful };
    Mode mode = Mode::HostOracle;
    ProgramPtr program;                 // both modes: the nominal word sequence
    std::array<TuringMachineSpec, 3> machines{};  // Faithful only
    long long faithful_horizon = 8;     // static budget check range
};

struct InitialWeights {
    Rational init_weight{1, 256};
    Rational wall_weight{1, 256};
    bool full_junk = false;  // uniform layers on composite cells (property tests)
};

struct WallInfo {
    int position = 0;
    bool initialized = false;        // attached time counter decodes to t-1
    long long time_value = -1;       // -1 when undecodable/saturated garbage length
    int time_length = 0;
    std::optional<long long> countdown;  // merging countdown value, when present
    bool merge_marked = false;
};

struct SegmentInfo {
    int left_wall = 0;   // position of the left bounding wall
    int right_wall = 0;
    int length = 0;      // interior cell count
    bool swept = false;
    int aux_cells = 0;
    int defect_cells = 0;        // blank-output interior cells
    std::optional<int> copy_front;  // leftmost copy cell, if a caterpillar is active
};

struct SegmentReport {
    long long t = 0;
    std::vector<WallInfo> walls;
    std::vector<SegmentInfo> segments;  // between consecutive walls, cyclic
    double aux_density = 0.0;           // fraction of cells not identified with B
    int init_count = 0;                 // Init symbols present (t = 0 only)
};

class ConstructionAutomaton {
public:
    // q >= 5; |B| in [2,6]. Faithful bindings run the static budget check.
    static ConstructionAutomaton build(Alphabet B, SequenceProgramBinding binding, int q,
                                       long long T0 = 2);

    const Schedule& schedule() const { return schedule_; }
    const Alphabet& output_alphabet() const { return B_; }
    const SequenceProgramBinding& binding() const { return binding_; }

    // the pure radius-3 local rule over packed cells
    RuleTable rule() const;

    // one synchronous step: local rule everywhere, then the schedule-driven
    // pass standing in for the comp layer (word staging, probes, merges)
    void advance(RingConfig& ring) const;

    RingConfig sample_initial(int L, const InitialWeights& w, uint64_t seed) const;

    SegmentReport segment_scan(const RingConfig& ring) const;

    std::function<std::array<uint8_t, 3>(cell_t)> palette() const;
    // human-readable code -> layer tuple listing for trace debugging
    std::string describe_cell(cell_t code) const;

    std::string phase_word(long long n) const;  // w_n staged at T(n)

private:
    Alphabet B_;
    Schedule schedule_;
    SequenceProgramBinding binding_;

    void host_pass(std::vector<Cell>& cells, long long t) const;
    void faithful_pass(std::vector<Cell>& cells, long long t) const;
    void launch_snake(std::vector<Cell>& cells, int wall_pos, const std::string& w) const;
};

// Local rule on an unpacked window of 7 cells (exposed for targeted tests).
Cell construction_cell_rule(const Cell* w, const Alphabet& B);

// The three machines shipped for Faithful-mode fidelity runs: a parity keeper,
// a word writer, and a two-cell shuttle. The writer either emits a constant
// word, or alternates two words by reading the keeper's parity cell.
std::array<TuringMachineSpec, 3> faithful_default_machines(const Alphabet& B,
                                                           const std::string& word);
std::array<TuringMachineSpec, 3> faithful_parity_machines(const Alphabet& B,
                                                          const std::string& even_word,
                                                          const std::string& odd_word);

}  // namespace calim

#include "calim/construction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calim {

// --- packing ----------------------------------------------------------------

cell_t pack_cell(const Cell& c) {
    cell_t v = 0;
    v |= (cell_t)(c.kind & 3);
    v |= (cell_t)(c.out & 7) << 2;
    v |= (cell_t)(c.time & 7) << 5;
    v |= (cell_t)(c.sst & 7) << 8;
    v |= (cell_t)(c.sval & 7) << 11;
    v |= (cell_t)(c.cp1 & 7) << 14;
    v |= (cell_t)(c.cp2 & 7) << 17;
    v |= (cell_t)(c.mdig & 7) << 20;
    v |= (cell_t)(c.mmark & 7) << 23;
    for (int i = 0; i < 3; ++i) {
        v |= (cell_t)(c.tape[i] & 7) << (26 + 8 * i);
        v |= (cell_t)(c.head[i] & 31) << (29 + 8 * i);
    }
    return v;
}

Cell unpack_cell(cell_t v) {
    Cell c;
    c.kind = v & 3;
    c.out = (v >> 2) & 7;
    c.time = (v >> 5) & 7;
    c.sst = (v >> 8) & 7;
    c.sval = (v >> 11) & 7;
    c.cp1 = (v >> 14) & 7;
    c.cp2 = (v >> 17) & 7;
    c.mdig = (v >> 20) & 7;
    c.mmark = (v >> 23) & 7;
    for (int i = 0; i < 3; ++i) {
        c.tape[i] = (v >> (26 + 8 * i)) & 7;
        c.head[i] = (v >> (29 + 8 * i)) & 31;
    }
    return c;
}

// --- schedule ----------------------------------------------------------------

namespace {
long long isqrt_ll(long long n) {
    long long r = (long long)std::sqrt((double)n);
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}
}  // namespace

long long Schedule::delta(long long n) const {
    long long e = isqrt_ll(n);
    long long p = 1;
    for (long long i = 0; i < e; ++i) {
        if (p > (1LL << 62) / q) throw std::overflow_error("Schedule: above 2^62");
        p *= q;
    }
    return p;
}

long long Schedule::T(long long n) const {
    long long acc = T0;
    for (long long k = 1; k <= n; ++k) {
        long long d = delta(k);
        if (acc > (1LL << 62) - d) throw std::overflow_error("Schedule: above 2^62");
        acc += d;
    }
    return acc;
}

long long Schedule::K(long long n) const {
    long long d = delta(n + 1);
    long long r = isqrt_ll(d);
    return r * r == d ? r : r + 1;
}

long long Schedule::phase_of(long long t) const {
    if (t < T(1)) return 0;
    long long n = 1;
    long long acc = T(1);
    while (true) {
        long long next = acc + delta(n + 1);
        if (next > t) return n;
        acc = next;
        ++n;
    }
}

// --- local rule ---------------------------------------------------------------

namespace {

inline bool s_any(const Cell& x) { return x.sst != SS_NONE; }
inline bool s_digit(const Cell& x) { return x.sst != SS_NONE && x.sval != SV_NONE; }
inline bool s_buf(const Cell& x) { return x.sst == SS_GO && x.sval == SV_NONE; }
inline bool s_go_digit(const Cell& x) { return x.sst == SS_GO && x.sval != SV_NONE; }
inline bool s_stopped(const Cell& x) {
    return x.sst == SS_STOP || x.sst == SS_PLUS || x.sst == SS_MINUS || x.sst == SS_EQ;
}
inline bool m_has_r(const Cell& x) { return x.mmark == MM_RIGHT || x.mmark == MM_BOTH; }
inline bool m_has_l(const Cell& x) { return x.mmark == MM_LEFT || x.mmark == MM_BOTH; }
inline bool copy_cell(const Cell& x) { return x.cp1 != CP_NONE; }
inline bool copy_full(const Cell& x) { return x.cp1 != CP_NONE && x.cp2 != CP_NONE; }

// the value digit one step less significant (to the right), looking through a
// single Go buffer; -1 when none
inline int lower_digit(const Cell* at3, int o) {
    const Cell& r1 = at3[o + 1];
    if (s_digit(r1)) return r1.sval;
    if (s_buf(r1) && s_digit(at3[o + 2])) return at3[o + 2].sval;
    return -1;
}

// unified per-step increment of a counter digit: the rightmost digit gains 1,
// others absorb the carry shown by their lower neighbor
inline uint8_t inc_sweep_digit(const Cell* at3, int o) {
    int lo = lower_digit(at3, o);
    return (uint8_t)(at3[o].sval % 2 + (lo == -1 ? 1 : (lo == 2 ? 1 : 0)));
}

struct SweepOut {
    uint8_t sst = SS_NONE;
    uint8_t sval = SV_NONE;
};

// tombstone: a dominated counter is erased whole, leftmost bits first, and a
// fast erase wave guarantees it never resumes with a decayed value
inline bool s_tomb(const Cell& x) { return x.sst == SS_STOP && x.sval == SV_NONE; }

SweepOut sweep_rule(const Cell* w) {
    auto at = [&](int o) -> const Cell& { return w[3 + o]; };
    const Cell& c = at(0);

    if (s_tomb(c)) return {};  // tombstones evaporate after one step

    // the erase wave travels right at speed two, overtaking any remnant that
    // tries to flee at speed one; it spreads only through connected material
    if (s_any(c) && (s_tomb(at(-1)) || (s_tomb(at(-2)) && s_any(at(-1)))))
        return {SS_STOP, SV_NONE};

    // Distinct counters never touch: when a foreign head closes to a one-cell
    // gap behind a stopped counter, its leftmost cell is shed (dominated) and
    // the rest is doomed. The counter's own compacting remnant is separated by
    // a buffer, never by an empty cell, so it is not mistaken for an eater.
    if (s_stopped(c) && !s_any(at(-1)) && !at(-1).is_wall() && s_go_digit(at(-2)))
        return {SS_STOP, SV_NONE};

    if (s_go_digit(c)) {
        if (at(+1).is_wall())
            return {SS_STOP, (uint8_t)(c.sval % 2 + 1)};
        if (s_tomb(at(+1))) return {SS_GO, (uint8_t)(c.sval % 2 + 1)};  // wait it out
        if (s_stopped(at(+1)))
            return {SS_STOP, (uint8_t)(c.sval % 2 + (s_digit(at(+1)) && at(+1).sval == 2))};
        // moving: the digit departs rightward
        bool behind = s_digit(at(-1)) || (s_buf(at(-1)) && s_digit(at(-2)));
        if (behind) return {SS_GO, SV_NONE};  // trailing buffer
        bool growth_ok = !at(-1).is_wall() && !s_any(at(-1)) && !s_go_digit(at(-2));
        if (c.sval == 2 && growth_ok) return {SS_GO, SV_NONE};  // room for the new MSB
        return {};
    }

    if (s_buf(c)) {
        if (s_go_digit(at(-1)))  // the digit behind moves in
            return {SS_GO, (uint8_t)(at(-1).sval % 2 + (s_digit(at(+1)) && at(+1).sval == 2))};
        if (s_digit(at(-1))) return {SS_GO, SV_NONE};  // resuming train approaches
        return {};
    }

    if (c.sst == SS_STOP) {
        uint8_t d = at(+1).is_wall() ? (uint8_t)(c.sval % 2 + 1) : inc_sweep_digit(w + 3, 0);
        // a blocked MSB pins its carry, exactly like the time layer
        if (c.sval == 2 && !s_any(at(-1)) && at(-1).is_wall()) d = 2;
        if (!at(+1).is_wall() && (!s_any(at(+1)) || s_buf(at(+1)) || s_go_digit(at(+1))))
            return {SS_GO, d};  // obstruction vanished or block resuming: follow
        // comparison start at the block MSB once everything has stopped
        bool msb = !s_any(at(-1)) && !s_any(at(-2)) && !s_any(at(-3));
        if (msb) {
            if (at(-1).time != TD_NONE && !at(-1).is_wall())
                return {SS_MINUS, d};  // time counter strictly longer: wall older
            int u0 = c.sval, u1 = std::max(lower_digit(w + 3, 0), 0);
            int v0 = c.time == TD_NONE ? 0 : c.time;
            int v1 = at(+1).time == TD_NONE ? 0 : at(+1).time;
            int a = u0 + u1 / 2, b = v0 + v1 / 2;
            if (a > b) return {SS_PLUS, d};
            if (a < b) return {SS_MINUS, d};
            return {SS_EQ, d};
        }
        // verdict wave moving in from the left
        if (s_stopped(at(-1)) && at(-1).sst != SS_STOP) {
            if (at(-1).sst == SS_PLUS) return {SS_PLUS, d};
            if (at(-1).sst == SS_MINUS) return {SS_MINUS, d};
            int u0 = c.sval, u1 = std::max(lower_digit(w + 3, 0), 0);
            int v0 = c.time == TD_NONE ? 0 : c.time;
            int v1 = at(+1).time == TD_NONE ? 0 : at(+1).time;
            int a = u0 + u1 / 2, b = v0 + v1 / 2;
            if (a > b) return {SS_PLUS, d};
            if (a < b) return {SS_MINUS, d};
            return {SS_EQ, d};
        }
        return {SS_STOP, d};
    }

    if (c.sst == SS_PLUS || c.sst == SS_EQ) {
        // A verdict block erodes or resumes from the right, depending on what
        // the rightmost bit decided; mid cells follow their right neighbor:
        // a Go trail means resume, a void means erasure.
        if (s_buf(at(+1)) || s_go_digit(at(+1)))
            return {SS_GO, inc_sweep_digit(w + 3, 0)};
        if (at(+1).is_wall() || !s_any(at(+1))) return {};
        return {c.sst, inc_sweep_digit(w + 3, 0)};
    }

    if (c.sst == SS_MINUS) {
        // wall destroyed; resume going right-to-left, blocked while an eater
        // is adjacent so dominated counters stay consumable
        uint8_t d = inc_sweep_digit(w + 3, 0);
        if (c.sval == 2 && !s_any(at(-1)) && at(-1).is_wall()) d = 2;
        bool clear_right = !at(+1).is_wall() &&
                           (!s_any(at(+1)) || s_buf(at(+1)) || s_go_digit(at(+1)));
        bool eater = s_go_digit(at(-1)) || s_go_digit(at(-2));
        if (clear_right && !eater) return {SS_GO, d};
        return {SS_MINUS, d};
    }

    // empty sweep layer: arrivals
    if (s_go_digit(at(-1)) && !s_any(at(-1 + 1)) /* me */) {
        // head advancing into free space
        return {SS_GO, (uint8_t)(at(-1).sval % 2 + 1)};
    }
    if (s_go_digit(at(+1)) && at(+1).sval == 2 && !s_go_digit(at(-1))) {
        // new most-significant digit emitted by a growing counter; when the
        // carrier is converting to Stop this step, the fresh digit joins the
        // stopped block so no carry is lost
        if (at(+2).is_wall() || s_stopped(at(+2))) return {SS_STOP, 1};
        return {SS_GO, 1};
    }
    // stopped and resuming counters extend their most significant digit the
    // same way time counters do, staying digit-synchronized with them
    if (s_digit(at(+1)) && at(+1).sval == 2 && s_stopped(at(+1)) && !s_go_digit(at(-1))) {
        return {at(+1).sst, 1};
    }
    return {};
}

struct CopyOut {
    uint8_t cp1 = CP_NONE;
    uint8_t cp2 = CP_NONE;
    bool write_out = false;
    uint8_t out_letter = CP_NONE;
};

CopyOut copy_rule(const Cell* w) {
    auto at = [&](int o) -> const Cell& { return w[3 + o]; };
    const Cell& c = at(0);

    // locate the head (leftmost cell) of the caterpillar run touching me
    auto head_offset = [&](int from) -> int {
        int h = from;
        while (h - 1 >= -3 && copy_cell(at(h - 1))) --h;
        return h;
    };
    auto blocked = [&](int h) {
        if (h - 1 < -3) return false;  // run longer than supported; head decides
        const Cell& b = at(h - 1);
        return b.is_wall() || s_any(b);
    };

    if (copy_cell(c)) {
        int h = head_offset(0);
        if (blocked(h)) {
            // termination on a wall or sweeping counter: letters settle in place
            return {CP_NONE, CP_NONE, true, c.cp1};
        }
        if (!copy_cell(at(+1))) {
            // tail vacates, writing its letter on the output layer
            return {CP_NONE, CP_NONE, true, c.cp1};
        }
        // interior: letters slide one slot toward the head
        uint8_t n1 = c.cp2 != CP_NONE ? c.cp2 : c.cp1;
        uint8_t n2 = copy_full(at(+1)) ? at(+1).cp1 : CP_NONE;
        return {n1, n2, false, CP_NONE};
    }

    // head formation one cell ahead of the run (runs span <= 3 cells)
    if (!s_any(c) && copy_cell(at(+1))) {
        int tail = 1;
        while (tail + 1 <= 3 && copy_cell(at(tail + 1))) ++tail;
        const Cell& tl = at(tail);
        uint8_t first = tl.cp2 != CP_NONE ? tl.cp2 : tl.cp1;
        uint8_t second = copy_full(at(+1)) ? at(+1).cp1 : CP_NONE;
        return {first, second, false, CP_NONE};
    }
    return {};
}

struct MergeOut {
    uint8_t mdig = MD_NONE;
    uint8_t mmark = MM_NONE;
};

MergeOut merge_rule(const Cell* w) {
    auto at = [&](int o) -> const Cell& { return w[3 + o]; };
    const Cell& c = at(0);
    MergeOut r;

    // countdown digit, -1-carry decrement; orphaned digits erode left to right
    if (c.mdig != MD_NONE) {
        bool anchored = at(-1).is_wall() || at(-1).mdig != MD_NONE;
        if (anchored) {
            int d = (int)c.mdig - 1;  // encoded 0,1,2 -> -1,0,1
            bool borrow = at(-1).is_wall() ? true : ((int)at(-1).mdig - 1 == -1);
            int base = d == -1 ? 1 : d;
            int nd = base - (borrow ? 1 : 0);
            r.mdig = (uint8_t)(nd + 1);
        }
    }

    // probe marks
    if (c.mmark == MM_M) {
        r.mmark = MM_M;
        return r;
    }
    if (c.mmark == MM_RET) {
        r.mmark = c.mdig != MD_NONE ? MM_M : MM_NONE;
        return r;
    }
    if (m_has_l(c) && at(-1).is_wall()) {
        r.mmark = MM_RET;
        return r;
    }
    bool right = m_has_r(at(-1));                      // probe moving right arrives
    bool left = m_has_l(at(+1));                       // probe moving left arrives
    if (m_has_r(c) && at(+1).is_wall()) left = true;   // bounce off the wall
    r.mmark = right && left ? MM_BOTH : right ? MM_RIGHT : left ? MM_LEFT : MM_NONE;
    return r;
}

uint8_t time_rule(const Cell* w) {
    auto at = [&](int o) -> const Cell& { return w[3 + o]; };
    const Cell& c = at(0);
    uint8_t tc = c.time;
    if (tc != TD_NONE) {
        if (at(+1).is_wall()) return (uint8_t)(tc % 2 + 1);  // attached LSB
        uint8_t tr = at(+1).time;
        if (tr == TD_NONE) return TD_NONE;  // detached: shed the rightmost digit
        // junk normalisation: leading zero with no carry incoming
        if (tc == 0 && at(-1).time == TD_NONE && !at(-1).is_wall() && tr != 2) return TD_NONE;
        // blocked MSB pins its carry instead of overwriting the obstruction
        if (tc == 2 && at(-1).time == TD_NONE &&
            (at(-1).is_wall() || at(-2).time != TD_NONE))
            return 2;
        return (uint8_t)(tc % 2 + (tr == 2 ? 1 : 0));
    }
    // extension: a new leading digit appears left of a carrying MSB
    if (at(+1).time == 2 && !at(+1).is_wall() && at(-1).time == TD_NONE) return 1;
    return TD_NONE;
}

}  // namespace

Cell construction_cell_rule(const Cell* w, const Alphabet& B) {
    (void)B;
    auto at = [&](int o) -> const Cell& { return w[3 + o]; };
    const Cell& c = at(0);

    bool any_init = false;
    for (int o = -3; o <= 3; ++o) any_init |= at(o).is_init();

    if (any_init) {
        // believed survival of an Init at offset o: no Init visible in its
        // three left cells; invisible killers only cause harmless extra seeds
        auto believed_survives = [&](int o) {
            if (!at(o).is_init()) return false;
            for (int e = 1; e <= 3; ++e) {
                int p = o - e;
                if (p >= -3 && at(p).is_init()) return false;
            }
            return true;
        };
        if (c.is_init()) return believed_survives(0) ? Cell::wall() : Cell::blank();
        bool near[7] = {};
        bool any_near = false;
        for (int o = -3; o <= 3; ++o) {
            if (o == 0) continue;
            near[o + 3] = believed_survives(o);
            any_near |= near[o + 3];
        }
        if (any_near) {
            bool left_zone = near[-1 + 3] || near[-2 + 3] || near[-3 + 3];
            bool right_zone = near[1 + 3] || near[2 + 3] || near[3 + 3];
            if (near[1 + 3] && !left_zone) {
                Cell seed;  // time counter starts at value 0 beside the new wall
                seed.time = 0;
                return seed;
            }
            if (near[-1 + 3] && !right_zone) {
                Cell seed;  // sweeping counter launched rightward, value 0
                seed.sst = SS_GO;
                seed.sval = 0;
                return seed;
            }
            return Cell::blank();
        }
        // an Init is visible but not believed to survive: fall through
    }

    if (c.is_wall()) {
        if (at(-1).time == TD_NONE) return Cell::blank();   // cannot be initialized
        if (at(-1).sst == SS_MINUS) return Cell::blank();   // lost the comparison
        return Cell::wall();
    }
    if (c.is_init()) return Cell::blank();  // unreachable; kept for totality

    Cell n;
    n.out = c.out;
    n.time = time_rule(w);
    SweepOut sw = sweep_rule(w);
    n.sst = sw.sst;
    n.sval = sw.sval;
    CopyOut cp = copy_rule(w);
    n.cp1 = cp.cp1;
    n.cp2 = cp.cp2;
    if (cp.write_out) n.out = cp.out_letter;
    MergeOut mg = merge_rule(w);
    n.mdig = mg.mdig;
    n.mmark = mg.mmark;
    if (n.time == TD_NONE) {
        // computation exists only inside the time counter
        n.tape = {TAPE_NONE, TAPE_NONE, TAPE_NONE};
        n.head = {HEAD_NONE, HEAD_NONE, HEAD_NONE};
    } else {
        n.tape = c.tape;
        n.head = c.head;
    }
    return n;
}

// --- automaton ----------------------------------------------------------------

ConstructionAutomaton ConstructionAutomaton::build(Alphabet B, SequenceProgramBinding binding,
                                                   int q, long long T0) {
    if (q < 5) throw std::invalid_argument("build_automaton: q >= 5 required");
    if (B.size() < 2 || B.size() > 6)
        throw std::invalid_argument("build_automaton: output alphabet size in [2,6]");
    if (!binding.program) throw std::invalid_argument("build_automaton: missing word program");
    if (binding.program->alphabet().symbols != B.symbols)
        throw std::invalid_argument("build_automaton: program alphabet mismatch");
    ConstructionAutomaton a;
    a.B_ = std::move(B);
    a.schedule_.q = q;
    a.schedule_.T0 = T0;
    a.binding_ = std::move(binding);
    if (a.binding_.mode == SequenceProgramBinding::Mode::Faithful) {
        // static budget check: the word machine must finish within each phase
        // and fit the space the time counter provides
        for (long long n = 1; n <= a.binding_.faithful_horizon; ++n) {
            TmRunResult r = run_tm(a.binding_.machines[1], {}, a.schedule_.delta(n) + 1);
            if (!r.halted || r.steps_used > a.schedule_.delta(n))
                throw std::runtime_error("faithful budget check: machine 2 too slow at n=" +
                                         std::to_string(n));
            long long counter_len = 1;
            for (long long v = a.schedule_.T(n) - 1; v > 1; v /= 2) ++counter_len;
            if (r.max_cell_touched + 1 > counter_len)
                throw std::runtime_error("faithful budget check: machine 2 exceeds space at n=" +
                                         std::to_string(n));
        }
    }
    return a;
}

RuleTable ConstructionAutomaton::rule() const {
    Alphabet B = B_;
    return RuleTable::callback(2, 3, [B](const cell_t* win) {
        Cell cells[7];
        for (int i = 0; i < 7; ++i) cells[i] = unpack_cell(win[i]);
        return pack_cell(construction_cell_rule(cells, B));
    });
}

std::string ConstructionAutomaton::phase_word(long long n) const {
    return binding_.program->word(n);
}

void ConstructionAutomaton::launch_snake(std::vector<Cell>& cells, int wall_pos,
                                         const std::string& w) const {
    int L = (int)cells.size();
    int m = (int)w.size();
    int qc = (m + 1) / 2;
    // spatial letter sequence: rotation fixed so the settled tiling reads
    // w anchored at the wall position (verified by the unit tests)
    int rot = (m % 2 == 0) ? 1 : 0;
    std::vector<uint8_t> seq(2 * qc, CP_NONE);
    for (int k = 0; k < m; ++k) seq[k] = (uint8_t)B_.index_of(w[(rot + k) % m]);
    for (int j = 0; j < qc; ++j) {
        const Cell& cc = cells[((wall_pos - qc + j) % L + L) % L];
        if (cc.is_wall() || cc.is_init()) return;  // segment too small; skip whole
    }
    for (int j = 0; j < qc; ++j) {
        Cell& cc = cells[((wall_pos - qc + j) % L + L) % L];
        cc.cp1 = seq[2 * j];
        cc.cp2 = seq[2 * j + 1];
    }
}

void ConstructionAutomaton::host_pass(std::vector<Cell>& cells, long long t) const {
    int L = (int)cells.size();
    auto cell = [&](long long i) -> Cell& { return cells[((i % L) + L) % L]; };

    long long n = schedule_.phase_of(t);
    bool phase_boundary = n >= 1 && schedule_.T(n) == t;

    if (!phase_boundary) {
        // countdown expiry: the round launched at T(n) with value 2(n+1) ends
        // one step after reaching zero, so a probe returning from a segment of
        // length exactly n+1 still finds live digits
        if (n >= 1 && t == schedule_.T(n) + 2 * (n + 1) + 1)
            for (auto& c : cells) c.mdig = MD_NONE;
        return;
    }

    // 1. merge: destroy marked walls (left bounds of the length-n segments)
    for (int i = 0; i < L; ++i) {
        if (!cells[i].is_wall()) continue;
        if (cell(i + 1).mmark == MM_M) {
            cells[i] = Cell::blank();  // defect cell; output stays blank until recopied
        }
    }
    // 2. clear every probe artifact from the finished round
    for (auto& c : cells) {
        c.mmark = MM_NONE;
        c.mdig = MD_NONE;
    }
    // 3. stage the phase word and launch the copy caterpillars; in Faithful
    // mode the staged word is read off the writer machine's tape
    bool faithful = binding_.mode == SequenceProgramBinding::Mode::Faithful;
    std::string host_word = phase_word(n);
    if ((int)host_word.size() > 6)
        throw std::runtime_error("staging guard: |w_n| > 6 unsupported by the copy layer");
    for (int j = 0; j < L; ++j) {
        if (!cells[j].is_wall()) continue;
        std::string w = host_word;
        if (faithful) {
            w.clear();
            const TuringMachineSpec& tm = binding_.machines[1];
            for (int o = 1; o <= L; ++o) {
                uint8_t ts = cell(j - o).tape[1];
                if (ts == TAPE_NONE || ts >= tm.tape_alphabet.size()) break;
                w += tm.tape_alphabet[ts];
            }
            if (w.empty()) continue;  // nothing computed yet (first phase)
            if ((int)w.size() > 6)
                throw std::runtime_error("staging guard: faithful word too long at t=" +
                                         std::to_string(t));
        }
        CounterDigits cd;
        for (int o = 1; o <= L; ++o) {
            if (cell(j - o).time == TD_NONE || cell(j - o).is_wall()) break;
            cd.digits.push_back(cell(j - o).time);
        }
        if ((int)cd.digits.size() < (int)w.size()) {
            // the guard binds for initialized walls; junk walls with stray
            // short counters are transient and simply skip the copy
            bool initialized = cd.digits.size() > 0 && cd.digits.size() <= 62 &&
                               cd.value() == t - 1;
            if (initialized)
                throw std::runtime_error(
                    "staging guard: word exceeds time-counter extent at t=" +
                    std::to_string(t));
            continue;
        }
        launch_snake(cells, j, w);
    }
    // 4. next merge round: countdown of value 2(n+1) plus a bouncing probe
    DecCounter cd = DecCounter::from_value(2 * (n + 1));
    for (int i = 0; i < L; ++i) {
        if (!cells[i].is_wall()) continue;
        bool fits = true;
        for (size_t d = 0; d < cd.digits.size(); ++d)
            if (cell(i + 1 + (long long)d).is_wall()) fits = false;
        if (!fits) continue;
        for (size_t d = 0; d < cd.digits.size(); ++d)
            cell(i + 1 + (long long)d).mdig = (uint8_t)(cd.digits[d] + 1);
        cell(i + 1).mmark = MM_RIGHT;
    }
}

void ConstructionAutomaton::faithful_pass(std::vector<Cell>& cells, long long t) const {
    if (binding_.mode != SequenceProgramBinding::Mode::Faithful) return;
    int L = (int)cells.size();
    // heads are (re)seeded beside every wall at phase starts; the shuttle on
    // layer 2 keeps running across phases
    long long n = schedule_.phase_of(t);
    if (n >= 1 && schedule_.T(n) == t) {
        for (int i = 0; i < L; ++i) {
            if (!cells[i].is_wall()) continue;
            Cell& seat = cells[(i - 1 + L) % L];
            if (seat.is_wall() || seat.time == TD_NONE) continue;
            for (int layer = 0; layer < 3; ++layer) {
                const TuringMachineSpec& tm = binding_.machines[layer];
                if (layer == 2 && (seat.head[2] != HEAD_NONE ||
                                   cells[(i - 2 + L) % L].head[2] != HEAD_NONE))
                    continue;  // the shuttle never halts; do not duplicate it
                uint8_t q0 = (uint8_t)(std::find(tm.states.begin(), tm.states.end(), tm.initial) -
                                       tm.states.begin());
                seat.head[layer] = q0;
            }
        }
    }
    // heads move on a tape laid along the time counter, cell 0 beside the wall
    // and higher indices leftward, so R means spatially left
    for (int layer = 0; layer < 3; ++layer) {
        const TuringMachineSpec& tm = binding_.machines[layer];
        std::vector<std::pair<int, uint8_t>> moves;
        for (int i = 0; i < L; ++i) {
            uint8_t h = cells[i].head[layer];
            if (h == HEAD_NONE) continue;
            if (h >= tm.states.size()) throw std::runtime_error("comp: head state out of range");
            const std::string& q = tm.states[h];
            if (tm.is_final(q)) continue;
            uint8_t ts = cells[i].tape[layer];
            std::string sym = ts == TAPE_NONE ? tm.blank : tm.tape_alphabet[ts];
            if (layer == 1 && q == tm.initial) {
                // the writer machine reads its input (the phase parity) from
                // layer 0's tape
                uint8_t p = cells[i].tape[0];
                const TuringMachineSpec& keeper = binding_.machines[0];
                sym = p == TAPE_NONE || p >= keeper.tape_alphabet.size()
                          ? tm.blank
                          : keeper.tape_alphabet[p];
            }
            auto it = tm.delta.find({q, sym});
            if (it == tm.delta.end()) throw std::runtime_error("comp: missing transition");
            const auto& [nq, wr, mv] = it->second;
            uint8_t wr_code = TAPE_NONE;
            if (wr != tm.blank) {
                auto p = std::find(tm.tape_alphabet.begin(), tm.tape_alphabet.end(), wr);
                wr_code = (uint8_t)(p - tm.tape_alphabet.begin());
            }
            uint8_t nq_code = (uint8_t)(std::find(tm.states.begin(), tm.states.end(), nq) -
                                        tm.states.begin());
            cells[i].tape[layer] = wr_code;
            cells[i].head[layer] = HEAD_NONE;
            int target = i;
            if (mv == 'R') target = (i - 1 + L) % L;  // tape index +1 = spatial left
            if (mv == 'L') target = (i + 1) % L;
            if (cells[target].is_wall() || cells[target].time == TD_NONE)
                throw std::runtime_error(
                    "comp space guard: head left the time-counter extent (run killed)");
            moves.push_back({target, nq_code});
        }
        for (auto& [pos, q] : moves) cells[pos].head[layer] = q;
    }
}

void ConstructionAutomaton::advance(RingConfig& ring) const {
    int L = ring.size();
    if (L < 7) throw std::invalid_argument("construction: ring length >= 7");
    std::vector<Cell> old(L), fresh(L);
    for (int i = 0; i < L; ++i) old[i] = unpack_cell(ring.cells[i]);
    Cell win[7];
    for (int i = 0; i < L; ++i) {
        for (int k = 0; k < 7; ++k) win[k] = old[(i - 3 + k + L) % L];
        fresh[i] = construction_cell_rule(win, B_);
    }
    faithful_pass(fresh, ring.t + 1);
    host_pass(fresh, ring.t + 1);
    for (int i = 0; i < L; ++i) ring.cells[i] = pack_cell(fresh[i]);
    ring.t += 1;
}

RingConfig ConstructionAutomaton::sample_initial(int L, const InitialWeights& wts,
                                                 uint64_t seed) const {
    Rng rng(seed);
    RingConfig ring;
    ring.cells.reserve(L);
    auto draw = [&](const Rational& p) {
        // exact Bernoulli draw on 64-bit resolution
        uint64_t r = rng.next();
        return (__int128)r * p.den() < ((__int128)p.num() << 64);
    };
    for (int i = 0; i < L; ++i) {
        Cell c;
        if (draw(wts.init_weight)) {
            c = Cell::init();
        } else if (draw(wts.wall_weight)) {
            c = Cell::wall();
        } else {
            c = Cell::letter((uint8_t)rng.below(B_.size()));
            if (wts.full_junk) {
                // Junk layers are drawn per cell, restricted to the
                // protocol-coherent states: counter digits and Go/Stop heads,
                // but not mid-protocol transients (buffers, verdict states,
                // probe marks, M/RET), whose uncaused appearance the paper's
                // Facts do not defend. See the module notes in the README.
                uint64_t r = rng.next();
                uint8_t td = r % 4;  // 0,1,2,#
                c.time = td == 3 ? TD_NONE : td;
                r = rng.next();
                int sv = r % 7;  // # (weight 1), (Go,d) or (Stop,d) for d in {0,1,2}
                if (sv >= 1 && sv <= 3) {
                    c.sst = SS_GO;
                    c.sval = (uint8_t)(sv - 1);
                } else if (sv >= 4) {
                    c.sst = SS_STOP;
                    c.sval = (uint8_t)(sv - 4);
                }
                r = rng.next();
                int cp = r % 7;  // #, (b,#), (b,b')
                if (cp >= 1 && cp <= 2) c.cp1 = (uint8_t)(cp - 1);
                if (cp >= 3) {
                    c.cp1 = (uint8_t)((cp - 3) / 2);
                    c.cp2 = (uint8_t)((cp - 3) % 2);
                }
                r = rng.next();
                int md = r % 4;
                c.mdig = md == 3 ? MD_NONE : (uint8_t)md;
            }
        }
        ring.cells.push_back(pack_cell(c));
    }
    ring.t = 0;
    return ring;
}

SegmentReport ConstructionAutomaton::segment_scan(const RingConfig& ring) const {
    int L = ring.size();
    std::vector<Cell> cells(L);
    for (int i = 0; i < L; ++i) cells[i] = unpack_cell(ring.cells[i]);
    auto cell = [&](long long i) -> const Cell& { return cells[((i % L) + L) % L]; };

    SegmentReport rep;
    rep.t = ring.t;
    int aux_total = 0;
    for (int i = 0; i < L; ++i) {
        const Cell& c = cells[i];
        if (c.is_init()) ++rep.init_count;
        bool pure = c.kind == KIND_CELL && c.aux_blank() && c.out != OUT_NONE;
        if (!pure) ++aux_total;
        if (!c.is_wall()) continue;
        WallInfo wi;
        wi.position = i;
        CounterDigits cd;
        for (int o = 1; o <= L; ++o) {
            uint8_t td = cell(i - o).time;
            if (td == TD_NONE || cell(i - o).is_wall()) break;
            cd.digits.push_back(td);
        }
        wi.time_length = (int)cd.digits.size();
        if (!cd.digits.empty() && cd.digits.size() <= 62) {
            wi.time_value = cd.value();
            wi.initialized = wi.time_value == ring.t - 1;
        }
        DecCounter dcc;
        for (int o = 1; o <= L; ++o) {
            uint8_t md = cell(i + o).mdig;
            if (md == MD_NONE || cell(i + o).is_wall()) break;
            dcc.digits.push_back((int8_t)(md - 1));
        }
        if (!dcc.digits.empty()) wi.countdown = dcc.value();
        wi.merge_marked = cell(i + 1).mmark == MM_M;
        rep.walls.push_back(wi);
    }
    rep.aux_density = (double)aux_total / (double)L;

    int W = (int)rep.walls.size();
    for (int a = 0; a < W; ++a) {
        const WallInfo& lw = rep.walls[a];
        const WallInfo& rw = rep.walls[(a + 1) % W];
        SegmentInfo seg;
        seg.left_wall = lw.position;
        seg.right_wall = rw.position;
        seg.length = (int)(((rw.position - lw.position - 1) % L + L) % L);
        if (W == 1) seg.length = L - 1;
        bool swept = true;
        bool in_attached_suffix = true;  // scanning right-to-left from the right wall
        for (int o = 1; o <= seg.length; ++o) {
            const Cell& c = cell(rw.position - o);
            if (s_any(c)) {
                if (!in_attached_suffix) swept = false;
            } else {
                in_attached_suffix = false;
            }
            bool pure = c.kind == KIND_CELL && c.aux_blank() && c.out != OUT_NONE;
            if (!pure) ++seg.aux_cells;
            if (c.kind == KIND_CELL && c.out == OUT_NONE) ++seg.defect_cells;
            if (copy_cell(c) && !seg.copy_front)
                seg.copy_front = (int)(((rw.position - o) % L + L) % L);
        }
        // the leftmost copy cell relative to the right wall is the last found
        if (seg.copy_front) {
            for (int o = seg.length; o >= 1; --o) {
                if (copy_cell(cell(rw.position - o))) {
                    seg.copy_front = (int)(((rw.position - o) % L + L) % L);
                    break;
                }
            }
        }
        seg.swept = swept;
        rep.segments.push_back(seg);
        if (W == 1) break;
    }
    return rep;
}

std::function<std::array<uint8_t, 3>(cell_t)> ConstructionAutomaton::palette() const {
    int b = B_.size();
    return [b](cell_t code) -> std::array<uint8_t, 3> {
        Cell c = unpack_cell(code);
        if (c.is_wall()) return {0, 0, 0};
        if (c.is_init()) return {220, 30, 30};
        if (c.sst != SS_NONE) {
            if (c.sst == SS_GO) return {255, 160, 40};
            if (c.sst == SS_STOP) return {255, 110, 30};
            if (c.sst == SS_MINUS) return {200, 40, 120};
            return {255, 200, 80};
        }
        if (c.cp1 != CP_NONE) return {60, 180, 90};
        if (c.mdig != MD_NONE || c.mmark != MM_NONE) return {150, 80, 200};
        if (c.time != TD_NONE) return {70, 120, 230};
        if (c.head[0] != HEAD_NONE || c.head[1] != HEAD_NONE || c.head[2] != HEAD_NONE)
            return {40, 200, 220};
        if (c.out == OUT_NONE) return {235, 235, 235};
        uint8_t shade = (uint8_t)(190 + (60 * (int)c.out) / std::max(1, b - 1));
        return {shade, shade, (uint8_t)(255 - shade / 4)};
    };
}

std::string ConstructionAutomaton::describe_cell(cell_t code) const {
    Cell c = unpack_cell(code);
    if (c.is_wall()) return "W";
    if (c.is_init()) return "I";
    auto letter = [&](uint8_t x) {
        return x == OUT_NONE ? std::string("#") : std::string(1, B_.symbols[x]);
    };
    std::string s = "(out=" + letter(c.out);
    s += ",time=" + (c.time == TD_NONE ? std::string("#") : std::to_string((int)c.time));
    const char* ss[] = {"#", "Go", "Stop", "+", "-", "="};
    s += ",sweep=" + std::string(ss[c.sst]);
    if (c.sst != SS_NONE)
        s += "/" + (c.sval == SV_NONE ? std::string("#") : std::to_string((int)c.sval));
    s += ",copy=" + (c.cp1 == CP_NONE ? std::string("#")
                                      : std::string(1, B_.symbols[c.cp1]) +
                                            (c.cp2 == CP_NONE ? "" : std::string(1, B_.symbols[c.cp2])));
    s += ",merge=";
    s += c.mdig == MD_NONE ? "#" : std::to_string((int)c.mdig - 1);
    const char* mm[] = {"", ">", "<", "<>", "M", "R"};
    if (c.mmark != MM_NONE) s += std::string("/") + mm[c.mmark];
    s += ")";
    return s;
}

// faithful-mode demo machines ------------------------------------------------

namespace {

TuringMachineSpec make_parity_keeper() {
    // toggles a parity symbol in place at each phase restart, tracking n mod 2
    TuringMachineSpec parity;
    parity.states = {"p0", "pf"};
    parity.tape_alphabet = {"0", "1"};
    parity.initial = "p0";
    parity.finals = {"pf"};
    parity.delta[{"p0", "#"}] = {"pf", "1", 'S'};
    parity.delta[{"p0", "0"}] = {"pf", "1", 'S'};
    parity.delta[{"p0", "1"}] = {"pf", "0", 'S'};
    return parity;
}

TuringMachineSpec make_shuttle() {
    // endless two-cell shuttle on the countdown layer
    TuringMachineSpec shuttle;
    shuttle.states = {"s0", "s1"};
    shuttle.tape_alphabet = {"x"};
    shuttle.initial = "s0";
    shuttle.delta[{"s0", "#"}] = {"s1", "x", 'R'};
    shuttle.delta[{"s0", "x"}] = {"s1", "x", 'R'};
    shuttle.delta[{"s1", "#"}] = {"s0", "x", 'L'};
    shuttle.delta[{"s1", "x"}] = {"s0", "x", 'L'};
    return shuttle;
}

// appends the states writing `word` rightward and halting in "wf"
void add_writer_chain(TuringMachineSpec& tm, const std::string& prefix, const std::string& word,
                      const std::string& from_state, const std::string& from_read) {
    std::string cur = from_state;
    std::string cur_read = from_read;
    for (size_t i = 0; i < word.size(); ++i) {
        std::string nxt = i + 1 == word.size() ? "wf" : prefix + std::to_string(i + 1);
        if (i > 0 && std::find(tm.states.begin(), tm.states.end(), cur) == tm.states.end())
            tm.states.push_back(cur);
        std::string out(1, word[i]);
        if (i == 0 && !cur_read.empty()) {
            tm.delta[{cur, cur_read}] = {nxt, out, 'R'};
        } else {
            tm.delta[{cur, tm.blank}] = {nxt, out, 'R'};
            for (const auto& sym : tm.tape_alphabet) tm.delta[{cur, sym}] = {nxt, out, 'R'};
        }
        cur = nxt;
    }
}

TuringMachineSpec writer_shell(const Alphabet& B) {
    TuringMachineSpec writer;
    writer.tape_alphabet.assign(B.symbols.size(), "");
    for (int i = 0; i < B.size(); ++i) writer.tape_alphabet[i] = std::string(1, B.symbols[i]);
    writer.initial = "w0";
    writer.finals = {"wf"};
    writer.states = {"w0", "wf"};
    return writer;
}

}  // namespace

std::array<TuringMachineSpec, 3> faithful_default_machines(const Alphabet& B,
                                                           const std::string& word) {
    for (char ch : word)
        if (!B.contains(ch)) throw std::invalid_argument("faithful writer: word off alphabet");
    TuringMachineSpec writer = writer_shell(B);
    add_writer_chain(writer, "e", word, "w0", "");
    // keep delta total in w0 for every readable symbol
    writer.validate();
    return {make_parity_keeper(), writer, make_shuttle()};
}

std::array<TuringMachineSpec, 3> faithful_parity_machines(const Alphabet& B,
                                                          const std::string& even_word,
                                                          const std::string& odd_word) {
    for (char ch : even_word + odd_word)
        if (!B.contains(ch)) throw std::invalid_argument("faithful writer: word off alphabet");
    // the writer's first read comes from the parity layer: "1" (odd n) selects
    // the odd chain, anything else the even chain
    TuringMachineSpec writer = writer_shell(B);
    for (const auto& sym : writer.tape_alphabet)
        if (sym != "1") add_writer_chain(writer, "e", even_word, "w0", sym);
    add_writer_chain(writer, "e", even_word, "w0", writer.blank);
    add_writer_chain(writer, "o", odd_word, "w0", "1");
    writer.validate();
    return {make_parity_keeper(), writer, make_shuttle()};
}

}  // namespace calim

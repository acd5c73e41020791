#pragma once

#include <map>
#include <string>
#include <vector>

namespace calim {

// One-sided-tape Turing machine. The blank symbol is written "#" and is not a
// member of the tape alphabet.
struct TuringMachineSpec {
    std::vector<std::string> states;
    std::vector<std::string> tape_alphabet;          // without blank
    std::string blank = "#";
    std::string initial;
    std::vector<std::string> finals;
    // (state, read symbol) -> (state, write symbol, move in {L,S,R})
    std::map<std::pair<std::string, std::string>, std::tuple<std::string, std::string, char>>
        delta;

    void validate() const;  // delta total on (Q \ Q_F) x (Gamma + blank)
    bool is_final(const std::string& q) const;
};

struct TmRunResult {
    bool halted = false;
    long long steps_used = 0;
    int max_cell_touched = 0;
    std::vector<std::string> tape;  // trailing blanks trimmed
    std::string state;
};

// Run at most max_steps transitions from the given input (empty = empty tape).
TmRunResult run_tm(const TuringMachineSpec& tm, const std::vector<std::string>& input,
                   long long max_steps);

// Steps until halting on empty input, or -1 if still running after max_steps.
long long halting_time(const TuringMachineSpec& tm, long long max_steps);

// A machine that runs right for `steps - 1` transitions and then halts, so it
// halts on empty input in exactly `steps` steps. Used by tests and demos.
TuringMachineSpec make_halt_after(int steps);
// A two-state machine that never halts.
TuringMachineSpec make_looper();

}  // namespace calim

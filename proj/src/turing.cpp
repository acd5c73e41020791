#include "calim/turing.hpp"

#include <algorithm>
#include <stdexcept>

namespace calim {

bool TuringMachineSpec::is_final(const std::string& q) const {
    return std::find(finals.begin(), finals.end(), q) != finals.end();
}

void TuringMachineSpec::validate() const {
    if (std::find(states.begin(), states.end(), initial) == states.end())
        throw std::invalid_argument("tm: initial state unknown");
    for (const auto& f : finals)
        if (std::find(states.begin(), states.end(), f) == states.end())
            throw std::invalid_argument("tm: final state unknown");
    std::vector<std::string> syms = tape_alphabet;
    syms.push_back(blank);
    for (const auto& q : states) {
        if (is_final(q)) continue;
        for (const auto& s : syms)
            if (!delta.count({q, s}))
                throw std::invalid_argument("tm: delta not total at (" + q + "," + s + ")");
    }
    for (const auto& [k, v] : delta) {
        char mv = std::get<2>(v);
        if (mv != 'L' && mv != 'S' && mv != 'R') throw std::invalid_argument("tm: bad move");
    }
}

TmRunResult run_tm(const TuringMachineSpec& tm, const std::vector<std::string>& input,
                   long long max_steps) {
    TmRunResult r;
    std::vector<std::string> tape = input;
    long long head = 0;
    std::string q = tm.initial;
    for (long long s = 0; s < max_steps; ++s) {
        if (tm.is_final(q)) break;
        if (head >= (long long)tape.size()) tape.resize(head + 1, tm.blank);
        const std::string& read = tape[head];
        auto it = tm.delta.find({q, read});
        if (it == tm.delta.end()) throw std::logic_error("tm: missing transition");
        const auto& [nq, wr, mv] = it->second;
        tape[head] = wr;
        q = nq;
        if (mv == 'R') ++head;
        else if (mv == 'L') head = std::max(0LL, head - 1);
        r.steps_used = s + 1;
        r.max_cell_touched = std::max(r.max_cell_touched, (int)head);
    }
    r.halted = tm.is_final(q);
    while (!tape.empty() && tape.back() == tm.blank) tape.pop_back();
    r.tape = std::move(tape);
    r.state = q;
    return r;
}

long long halting_time(const TuringMachineSpec& tm, long long max_steps) {
    TmRunResult r = run_tm(tm, {}, max_steps);
    return r.halted ? r.steps_used : -1;
}

TuringMachineSpec make_halt_after(int steps) {
    if (steps < 1) throw std::invalid_argument("make_halt_after: steps >= 1");
    TuringMachineSpec tm;
    tm.tape_alphabet = {"a"};
    tm.initial = "q0";
    tm.finals = {"qf"};
    for (int i = 0; i < steps; ++i) tm.states.push_back("q" + std::to_string(i));
    tm.states.push_back("qf");
    for (int i = 0; i < steps; ++i) {
        std::string next = i + 1 == steps ? "qf" : "q" + std::to_string(i + 1);
        tm.delta[{"q" + std::to_string(i), "#"}] = {next, "a", 'R'};
        tm.delta[{"q" + std::to_string(i), "a"}] = {next, "a", 'R'};
    }
    return tm;
}

TuringMachineSpec make_looper() {
    TuringMachineSpec tm;
    tm.states = {"q0", "q1"};
    tm.tape_alphabet = {"a"};
    tm.initial = "q0";
    tm.delta[{"q0", "#"}] = {"q1", "a", 'R'};
    tm.delta[{"q0", "a"}] = {"q1", "a", 'R'};
    tm.delta[{"q1", "#"}] = {"q0", "a", 'L'};
    tm.delta[{"q1", "a"}] = {"q0", "a", 'L'};
    return tm;
}

}  // namespace calim

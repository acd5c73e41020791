#pragma once

#include <string>

#include "calim/approx.hpp"
#include "calim/harness.hpp"
#include "calim/measures.hpp"
#include "calim/turing.hpp"

namespace calim {

// JSON wire formats (see README):
//   measures:  {"kind":"bernoulli","weights":["1/2","1/2"]}
//              {"kind":"markov","P":[["3/4","1/4"],["1/4","3/4"]],"pi":["1/2","1/2"]}
//              {"kind":"periodic","word":"0011"}
//              {"kind":"table","depth":2,"entries":{"01":"1/4",...}}
//   programs:  {"kind":"explicit","words":[...],"cycle_from":0}
//              {"kind":"alternating","words":["01","0011"]}
//              {"kind":"cover","descriptor":"singleton:01" | "segment:0:1","budget":2000}
//              {"kind":"rice","machine":"tm.json","halt_seq":{...},"loop_seq":{...}}
//              optionally wrapped as {"kind":"padded","inner":{...}}
//   machines:  {"states":[...],"tape":[...],"blank":"#","initial":"q0",
//               "final":[...],"delta":{"q0,a":["q1","b","R"],...}}
//   automaton: {"B":"01","q":5,"T0":2,"binding":{"mode":"host","sequence":{...}}}

MeasureSource measure_from_json(const std::string& text);
std::string measure_to_json(const MeasureSource& src);

TuringMachineSpec tm_from_json(const std::string& text);
std::string tm_to_json(const TuringMachineSpec& tm);

ProgramPtr program_from_json(const std::string& text);

struct AutomatonConfig {
    Alphabet B;
    int q = 5;
    long long T0 = 2;
    SequenceProgramBinding binding;
};
AutomatonConfig automaton_from_json(const std::string& text);

struct ExperimentFile {
    AutomatonConfig automaton;
    ExperimentConfig experiment;
};
// schema field "calim-experiment-v1"
ExperimentFile experiment_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace calim

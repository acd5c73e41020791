#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "calim/approx.hpp"
#include "calim/construction.hpp"
#include "calim/harness.hpp"
#include "calim/json_io.hpp"

namespace py = pybind11;
using namespace calim;

namespace {

MeasureSource measure_of(const std::string& json) { return measure_from_json(json); }

double rat(const Rational& r) { return r.to_double(); }

}  // namespace

PYBIND11_MODULE(pycalim, m) {
    m.doc() = "cellular-automaton limit-measure toolkit";

    m.def("cylinder_prob", [](const std::string& measure_json, const std::string& u) {
        return cylinder_prob(measure_of(measure_json), u).str();
    });

    m.def("distance_truncated",
          [](const std::string& mu, const std::string& nu, int N) {
              auto d = distance_truncated(measure_of(mu), measure_of(nu), N);
              return py::make_tuple(d.lower.str(), d.upper.str());
          });

    m.def("psi_mixing_coeff", [](const std::string& measure_json, int n) {
        return psi_mixing_coeff(measure_of(measure_json), n).str();
    });

    m.def("sample_ring", [](const std::string& measure_json, int L, uint64_t seed) {
        return sample_ring(measure_of(measure_json), L, seed);
    });

    m.def("alpha_k", [](int s, long long k) -> py::object {
        auto a = alpha_k(s, k);
        if (!a) return py::none();
        return py::cast(a->str());
    });

    m.def("debruijn_periodic_approx", [](const std::string& measure_json, int n) {
        return debruijn_periodic_approx(measure_of(measure_json), n).word;
    });

    m.def("exact_pushforward",
          [](int rule, const std::string& measure_json, const std::string& u, int t) {
              return exact_pushforward(RuleTable::elementary(rule), measure_of(measure_json), u, t)
                  .str();
          });

    m.def("elementary_step", [](int rule, const std::string& ring) {
        RingConfig cfg = ring_from_string(ring, Alphabet::binary());
        return ring_to_string(step(RuleTable::elementary(rule), cfg), Alphabet::binary());
    });

    m.def("schedule_T", [](int q, long long T0, long long n) {
        Schedule s{q, T0};
        return s.T(n);
    });
    m.def("schedule_K", [](int q, long long T0, long long n) {
        Schedule s{q, T0};
        return s.K(n);
    });

    m.def("inc_digits", [](const std::string& u) {
        return inc_digits(CounterDigits::from_string(u)).to_string();
    });
    m.def("counter_value",
          [](const std::string& u) { return CounterDigits::from_string(u).value(); });
    m.def("compare_sign", [](const std::string& u, const std::string& v) {
        return (int)compare_sign(CounterDigits::from_string(u), CounterDigits::from_string(v));
    });

    m.def("rice_word",
          [](int halt_steps, const std::string& halt_word, const std::string& loop_word,
             long long n) {
              Alphabet bin = Alphabet::binary();
              auto a = WordSequenceProgram::explicit_list(bin, {halt_word}, 0);
              auto b = WordSequenceProgram::explicit_list(bin, {loop_word}, 0);
              return rice_reduction(make_halt_after(halt_steps), *a, *b, n);
          });

    m.def(
        "run_experiment_csv",
        [](const std::string& config_json, int jobs) {
            ExperimentFile f = experiment_from_json(config_json);
            if (jobs > 0) f.experiment.jobs = jobs;
            ConstructionAutomaton a = ConstructionAutomaton::build(
                f.automaton.B, f.automaton.binding, f.automaton.q, f.automaton.T0);
            auto rows = run_experiment(a, f.experiment);
            cesaro_track(a, f.experiment, rows);
            return rows_to_csv(rows, f.experiment.depth, a.output_alphabet());
        },
        py::arg("config_json"), py::arg("jobs") = 1);

    m.def("measure_distance_double",
          [](const std::string& mu, const std::string& nu, int N) {
              auto d = distance_truncated(measure_of(mu), measure_of(nu), N);
              return py::make_tuple(rat(d.lower), rat(d.upper));
          });
}

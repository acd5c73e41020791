#include "doctest.h"

#include "calim/harness.hpp"
#include "calim/json_io.hpp"

using namespace calim;

namespace {

const Alphabet bin = Alphabet::binary();

ConstructionAutomaton host_automaton() {
    SequenceProgramBinding b;
    b.mode = SequenceProgramBinding::Mode::HostOracle;
    b.program = WordSequenceProgram::explicit_list(bin, {"01"}, 0);
    return ConstructionAutomaton::build(bin, b, 5, 2);
}

}  // namespace

TEST_CASE("row 0 with S=1 reproduces the sampled ring's empirical measure") {
    ConstructionAutomaton a = host_automaton();
    ExperimentConfig cfg;
    cfg.L = 128;
    cfg.S = 1;
    cfg.depth = 3;
    cfg.observe.explicit_times = {0};
    cfg.seed = 77;
    cfg.reference = a.binding().program;
    auto rows = run_experiment(a, cfg);
    REQUIRE(rows.size() == 1);
    rows[0].table.check_invariants();

    RingConfig ring = a.sample_initial(cfg.L, cfg.initial, Rng(cfg.seed).fork(0).next());
    CylinderTable direct = empirical_measure({project_output(a, ring)}, cfg.depth, bin);
    for (const auto& [w, p] : direct.prob) CHECK(rows[0].table.at(w) == p);
}

TEST_CASE("experiment rows pass table invariants and are deterministic") {
    ConstructionAutomaton a = host_automaton();
    ExperimentConfig cfg;
    cfg.L = 128;
    cfg.S = 4;
    cfg.depth = 3;
    cfg.observe.n_max = 2;
    cfg.seed = 5;
    cfg.jobs = 2;
    cfg.reference = a.binding().program;
    auto rows1 = run_experiment(a, cfg);
    cesaro_track(a, cfg, rows1);
    for (auto& r : rows1) r.table.check_invariants();
    auto rows2 = run_experiment(a, cfg);
    cesaro_track(a, cfg, rows2);
    CHECK(rows_to_csv(rows1, cfg.depth, bin) == rows_to_csv(rows2, cfg.depth, bin));

    // worker count never changes the result
    ExperimentConfig serial = cfg;
    serial.jobs = 1;
    auto rows3 = run_experiment(a, serial);
    cesaro_track(a, serial, rows3);
    CHECK(rows_to_csv(rows1, cfg.depth, bin) == rows_to_csv(rows3, cfg.depth, bin));

    // distances are finite and ordered
    for (const auto& r : rows1) {
        CHECK(r.dist_lower <= r.dist_upper);
        CHECK(r.dist_lower >= Rational(0));
    }
}

TEST_CASE("budget refusal carries a suggested plan") {
    ConstructionAutomaton a = host_automaton();
    ExperimentConfig cfg;
    cfg.L = 1024;
    cfg.S = 1000000;
    cfg.observe.n_max = 9;
    cfg.seed = 1;
    try {
        run_experiment(a, cfg);
        FAIL("expected refusal");
    } catch (const std::length_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("reduce S") != std::string::npos);
    }
}

TEST_CASE("cesaro tracker averages tables exactly") {
    ConstructionAutomaton a = host_automaton();
    ExperimentConfig cfg;
    cfg.depth = 1;
    cfg.reference = WordSequenceProgram::explicit_list(bin, {"0"}, 0);

    std::vector<TimeSeriesRow> rows(2);
    for (auto& r : rows) {
        r.table.alphabet = bin;
        r.table.depth = 1;
        r.table.prob[""] = Rational(1);
    }
    rows[0].t = 0;
    rows[0].table.prob["0"] = Rational(1);
    rows[1].t = 1;
    rows[1].table.prob["1"] = Rational(1);
    cesaro_track(a, cfg, rows);
    // first row: mean is the Dirac-like table itself, distance 0 to mu_0
    CHECK(rows[0].cesaro_lower == Rational(0));
    // second row: mean gives p[0]=1/2; depth-1 distance to mu_0 is 1/4
    CHECK(rows[1].cesaro_lower == Rational(1, 4));
}

TEST_CASE("csv emission round trips through a file") {
    ConstructionAutomaton a = host_automaton();
    ExperimentConfig cfg;
    cfg.L = 64;
    cfg.S = 2;
    cfg.depth = 2;
    cfg.observe.explicit_times = {0, 3};
    cfg.seed = 9;
    cfg.reference = a.binding().program;
    auto rows = run_experiment(a, cfg);
    cesaro_track(a, cfg, rows);
    std::string csv = rows_to_csv(rows, cfg.depth, bin);
    // header plus one line per observation
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("p[01]") != std::string::npos);
    emit_csv(rows, cfg.depth, bin, "test_rows.csv");
    CHECK(read_file("test_rows.csv") == csv);

    std::vector<TimeSeriesRow> empty;
    std::string header_only = rows_to_csv(empty, 2, bin);
    CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 1);
}

TEST_CASE("tail statistic is non-increasing across phases (within slack)") {
    // empirical surrogate of the acceptable-segment proposition: the fraction
    // of cells in segments longer than K(n) at T(n), for n in [4,12]; desk
    // scale plateaus are tolerated with a small slack
    ConstructionAutomaton a = host_automaton();
    const Schedule& s = a.schedule();
    ExperimentConfig cfg;
    cfg.L = 1024;
    cfg.S = 20;
    cfg.depth = 2;
    for (long long n = 4; n <= 12; ++n) cfg.observe.explicit_times.push_back(s.T(n));
    cfg.seed = 21;
    cfg.jobs = 4;
    cfg.initial.init_weight = Rational(1, 64);
    cfg.initial.wall_weight = Rational(1, 64);
    cfg.reference = a.binding().program;
    auto rows = run_experiment(a, cfg);
    REQUIRE(rows.size() == 9);
    for (size_t i = 0; i + 1 < rows.size(); ++i)
        CHECK(rows[i + 1].segments.tail_fraction <= rows[i].segments.tail_fraction + 0.02);
    // the merge schedule's contract: every segment at T(n) has length >= n
    for (size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].segments.min_len >= (long long)(4 + i));
}

TEST_CASE("spacetime rendering emits a P6 image with wall columns") {
    ConstructionAutomaton a = host_automaton();
    InitialWeights w;
    w.init_weight = Rational(1, 16);
    std::string ppm = render_spacetime(a, w, 64, 32, 3);
    CHECK(ppm.substr(0, 2) == "P6");
    // header "P6\n64 33\n255\n"
    CHECK(ppm.find("64 33") != std::string::npos);
    CHECK(ppm.size() > 64 * 33 * 3);
}

TEST_CASE("experiment JSON config parses and runs") {
    std::string text = R"({
      "schema": "calim-experiment-v1",
      "automaton": {"B":"01","q":5,"T0":2,
                    "binding":{"mode":"host","sequence":{"kind":"explicit","words":["01"],"cycle_from":0}}},
      "L": 64, "S": 2, "depth": 2, "observe_times": [0, 5], "seed": 11
    })";
    ExperimentFile f = experiment_from_json(text);
    ConstructionAutomaton a = ConstructionAutomaton::build(f.automaton.B, f.automaton.binding,
                                                           f.automaton.q, f.automaton.T0);
    auto rows = run_experiment(a, f.experiment);
    CHECK(rows.size() == 2);
    // seed is mandatory
    CHECK_THROWS(experiment_from_json(R"({"schema":"calim-experiment-v1",
        "automaton":{"B":"01","binding":{"mode":"host","sequence":{"kind":"explicit","words":["01"],"cycle_from":0}}}})"));
}

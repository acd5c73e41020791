// calim: simulator and measure-analysis toolkit for one-dimensional cellular
// automata realizing prescribed limit measures.
//
// Subcommands: approx, cover, pushforward, simulate, experiment, render, sequence

#include <iostream>

#include "CLI11.hpp"
#include "calim/approx.hpp"
#include "calim/construction.hpp"
#include "calim/harness.hpp"
#include "calim/json_io.hpp"

using namespace calim;

namespace {

MeasureSource measure_from_flags(const std::string& file, const std::string& bernoulli,
                                 const std::string& periodic) {
    if (!file.empty()) return measure_from_json(read_file(file));
    if (!bernoulli.empty()) {
        BernoulliSpec b;
        std::string syms;
        size_t start = 0;
        while (start <= bernoulli.size()) {
            auto comma = bernoulli.find(',', start);
            std::string piece = bernoulli.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            b.weights.push_back(Rational::parse(piece));
            syms.push_back((char)('0' + syms.size()));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        b.alphabet = Alphabet{syms};
        b.validate();
        return b;
    }
    if (!periodic.empty())
        return PeriodicOrbitMeasure{Alphabet::binary(), periodic};
    throw CLI::ValidationError("need --measure, --bernoulli or --periodic");
}

int cmd_approx(const MeasureSource& m, int n, bool by_precision) {
    DeBruijnBuild b = by_precision
                          ? debruijn_periodic_approx(
                                m, debruijn_depth_for_precision(source_alphabet(m).size(), n))
                          : debruijn_periodic_approx(m, n);
    std::cout << b.word << "\n";
    std::cerr << "word length " << b.word.size() << " (bound "
              << "|A|^" << 3 * b.n + 1 << "), added edges " << b.added_edges << "\n";
    PeriodicOrbitMeasure pi{source_alphabet(m), b.word};
    std::cerr << "frequency errors at depth " << b.n << ":\n";
    for (const auto& [w, c] : b.counts) {
        Rational err = (pi.cylinder(w) - cylinder_prob(m, w)).abs();
        std::cerr << "  " << w << ": " << err.str() << " (" << err.to_double() << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cellular-automaton limit-measure toolkit"};
    app.require_subcommand(1);

    // approx
    auto* ap = app.add_subcommand("approx", "de Bruijn periodic approximation of a measure");
    std::string ap_measure, ap_bern, ap_per;
    int ap_n = 2;
    bool ap_prec = false;
    ap->add_option("--measure", ap_measure, "measure JSON file");
    ap->add_option("--bernoulli", ap_bern, "inline Bernoulli weights, e.g. 1/2,1/2");
    ap->add_option("--periodic", ap_per, "inline periodic word over {0,1}");
    ap->add_option("--n", ap_n, "depth (or precision index with --precision)");
    ap->add_flag("--precision", ap_prec, "treat --n as 2^-n distance precision");

    // cover
    auto* cov = app.add_subcommand("cover", "polygonal cover word enumeration");
    std::string cov_desc = "singleton:01";
    long long cov_budget = 500;
    cov->add_option("--descriptor", cov_desc, "singleton:<w> or segment:<u>:<v>");
    cov->add_option("--budget", cov_budget, "enumeration time budget");

    // pushforward
    auto* pf = app.add_subcommand("pushforward", "exact pushforward of a cylinder");
    std::string pf_measure, pf_bern, pf_per, pf_word = "1";
    int pf_rule = 90, pf_t = 1;
    pf->add_option("--rule", pf_rule, "elementary rule number");
    pf->add_option("--measure", pf_measure, "measure JSON file");
    pf->add_option("--bernoulli", pf_bern, "inline Bernoulli weights");
    pf->add_option("--periodic", pf_per, "inline periodic word");
    pf->add_option("--word", pf_word, "target cylinder word");
    pf->add_option("--t", pf_t, "steps");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a construction automaton on one ring");
    std::string sim_cfg, sim_trace;
    int sim_L = 512;
    long long sim_T = 200;
    uint64_t sim_seed = 0;
    bool sim_have_seed = false, sim_codes = false;
    sim->add_option("--automaton", sim_cfg, "automaton JSON config")->required();
    sim->add_option("--L", sim_L, "ring length");
    sim->add_option("--T", sim_T, "steps");
    sim->add_option("--trace", sim_trace, "write a P6 space-time diagram here");
    sim->add_option("--seed", sim_seed, "rng seed (required)")
        ->each([&](const std::string&) { sim_have_seed = true; });
    sim->add_flag("--dump-codes", sim_codes, "print the packed-cell code table and exit");

    // experiment
    auto* ex = app.add_subcommand("experiment", "multi-ring measure experiment");
    std::string ex_cfg, ex_csv;
    int ex_jobs = 0;
    ex->add_option("--config", ex_cfg, "experiment JSON config")->required();
    ex->add_option("--csv", ex_csv, "output CSV path")->required();
    ex->add_option("--jobs", ex_jobs, "worker threads (overrides config)");

    // render (elementary rules)
    auto* rn = app.add_subcommand("render", "space-time diagram of an elementary rule");
    int rn_rule = 90, rn_L = 256;
    long long rn_T = 256;
    std::string rn_out = "trace.pgm", rn_init;
    rn->add_option("--rule", rn_rule, "elementary rule number");
    rn->add_option("--L", rn_L, "ring length");
    rn->add_option("--T", rn_T, "steps");
    rn->add_option("--init", rn_init, "initial ring as 0/1 string (default: single 1)");
    rn->add_option("--out", rn_out, "output PGM path");

    // sequence
    auto* sq = app.add_subcommand("sequence", "evaluate a word-sequence program");
    std::string sq_kind = "rice", sq_tm, sq_halt, sq_loop, sq_json;
    long long sq_from = 0, sq_to = 20;
    sq->add_option("--kind", sq_kind, "rice | json");
    sq->add_option("--tm", sq_tm, "turing machine JSON file (rice)");
    sq->add_option("--halt-seq", sq_halt, "program JSON file for the halting branch");
    sq->add_option("--loop-seq", sq_loop, "program JSON file for the running branch");
    sq->add_option("--program", sq_json, "program JSON file (kind=json)");
    sq->add_option("--from", sq_from, "first index");
    sq->add_option("--to", sq_to, "one past the last index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints usage/help
        return code == 0 ? 0 : 1;
    }

    try {
        if (ap->parsed())
            return cmd_approx(measure_from_flags(ap_measure, ap_bern, ap_per), ap_n, ap_prec);

        if (cov->parsed()) {
            Sigma2Descriptor d = [&] {
                auto colon = cov_desc.find(':');
                std::string kind = cov_desc.substr(0, colon);
                std::string rest = cov_desc.substr(colon + 1);
                if (kind == "singleton")
                    return Sigma2Descriptor::distance_to_segments(Alphabet::binary(),
                                                                  {{rest, rest}});
                auto c2 = rest.find(':');
                return Sigma2Descriptor::distance_to_segments(
                    Alphabet::binary(), {{rest.substr(0, c2), rest.substr(c2 + 1)}});
            }();
            CoverState st = polygonal_cover(d, cov_budget);
            for (const auto& w : st.emitted) std::cout << w << "\n";
            return 0;
        }

        if (pf->parsed()) {
            MeasureSource m = measure_from_flags(pf_measure, pf_bern, pf_per);
            RuleTable rule = RuleTable::elementary(pf_rule);
            std::cout << exact_pushforward(rule, m, pf_word, pf_t).str() << "\n";
            return 0;
        }

        if (sim->parsed()) {
            AutomatonConfig cfg = automaton_from_json(read_file(sim_cfg));
            ConstructionAutomaton a =
                ConstructionAutomaton::build(cfg.B, cfg.binding, cfg.q, cfg.T0);
            if (sim_codes) {
                // code -> layer tuple table for the cells a trace can contain:
                // the distinguished symbols plus one exemplar per layer value
                std::vector<Cell> cells{Cell::wall(), Cell::init(), Cell::blank()};
                for (int b = 0; b < cfg.B.size(); ++b) cells.push_back(Cell::letter(b));
                for (uint8_t d = 0; d <= 2; ++d) {
                    Cell c = Cell::letter(0);
                    c.time = d;
                    cells.push_back(c);
                }
                for (uint8_t st : {SS_GO, SS_STOP, SS_PLUS, SS_MINUS, SS_EQ}) {
                    Cell c = Cell::letter(0);
                    c.sst = st;
                    c.sval = st == SS_GO ? SV_NONE : 1;
                    cells.push_back(c);
                }
                {
                    Cell c = Cell::letter(0);
                    c.cp1 = 0;
                    c.cp2 = 1;
                    cells.push_back(c);
                }
                for (uint8_t m : {MM_RIGHT, MM_LEFT, MM_M}) {
                    Cell c = Cell::letter(0);
                    c.mmark = m;
                    cells.push_back(c);
                }
                {
                    Cell c = Cell::letter(0);
                    c.mdig = 2;
                    cells.push_back(c);
                }
                for (const Cell& c : cells)
                    std::cout << pack_cell(c) << "\t" << a.describe_cell(pack_cell(c)) << "\n";
                std::cout << "# layers combine independently; describe_cell decodes any code\n";
                return 0;
            }
            if (!sim_have_seed) {
                std::cerr << "simulate: --seed is required\n";
                return 1;
            }
            InitialWeights w;
            if (!sim_trace.empty()) {
                write_file(sim_trace, render_spacetime(a, w, sim_L, sim_T, sim_seed));
                std::cerr << "wrote " << sim_trace << "\n";
            } else {
                RingConfig ring = a.sample_initial(sim_L, w, sim_seed);
                for (long long t = 0; t < sim_T; ++t) a.advance(ring);
                SegmentReport rep = a.segment_scan(ring);
                std::cout << "t=" << rep.t << " walls=" << rep.walls.size()
                          << " aux_density=" << rep.aux_density << "\n";
            }
            return 0;
        }

        if (ex->parsed()) {
            ExperimentFile f = experiment_from_json(read_file(ex_cfg));
            if (ex_jobs > 0) f.experiment.jobs = ex_jobs;
            ConstructionAutomaton a = ConstructionAutomaton::build(
                f.automaton.B, f.automaton.binding, f.automaton.q, f.automaton.T0);
            std::vector<TimeSeriesRow> rows;
            try {
                rows = run_experiment(a, f.experiment);
            } catch (const std::length_error& e) {
                std::cerr << e.what() << "\n";
                return 2;
            }
            cesaro_track(a, f.experiment, rows);
            emit_csv(rows, f.experiment.depth, a.output_alphabet(), ex_csv);
            std::cerr << "wrote " << ex_csv << " (" << rows.size() << " rows)\n";
            return 0;
        }

        if (rn->parsed()) {
            RuleTable rule = RuleTable::elementary(rn_rule);
            RingConfig ring;
            if (rn_init.empty()) {
                ring.cells.assign(rn_L, 0);
                ring.cells[rn_L / 2] = 1;
            } else {
                ring = ring_from_string(rn_init, Alphabet::binary());
            }
            SpaceTimeTrace tr;
            iterate(rule, ring, rn_T, true, &tr);
            write_file(rn_out, trace_to_pgm(tr, 2));
            std::cerr << "wrote " << rn_out << "\n";
            return 0;
        }

        if (sq->parsed()) {
            ProgramPtr prog;
            if (sq_kind == "rice") {
                TuringMachineSpec tm = tm_from_json(read_file(sq_tm));
                prog = WordSequenceProgram::rice(tm, program_from_json(read_file(sq_halt)),
                                                 program_from_json(read_file(sq_loop)));
            } else {
                prog = program_from_json(read_file(sq_json));
            }
            for (long long n = sq_from; n < sq_to; ++n)
                std::cout << n << " " << prog->word(n) << "\n";
            return 0;
        }
    } catch (const std::length_error& e) {
        std::cerr << "budget refused: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

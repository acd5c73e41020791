#include "calim/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace calim {

using nlohmann::json;

namespace {

Rational rat(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    return Rational::parse(j.get<std::string>());
}

Alphabet alphabet_of_words(const std::vector<std::string>& words) {
    std::string syms = "01";  // binary baseline; widened by the words seen
    for (const auto& w : words)
        for (char c : w)
            if (syms.find(c) == std::string::npos) syms.push_back(c);
    std::sort(syms.begin(), syms.end());
    return Alphabet{syms};
}

}  // namespace

MeasureSource measure_from_json(const std::string& text) {
    json j = json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "bernoulli") {
        BernoulliSpec b;
        std::string syms = j.value("alphabet", std::string());
        for (const auto& w : j.at("weights")) b.weights.push_back(rat(w));
        if (syms.empty())
            for (size_t i = 0; i < b.weights.size(); ++i) syms.push_back((char)('0' + i));
        b.alphabet = Alphabet{syms};
        b.validate();
        return b;
    }
    if (kind == "markov") {
        MarkovSpec m;
        for (const auto& row : j.at("P")) {
            std::vector<Rational> r;
            for (const auto& x : row) r.push_back(rat(x));
            m.transition.push_back(std::move(r));
        }
        for (const auto& x : j.at("pi")) m.stationary.push_back(rat(x));
        std::string syms = j.value("alphabet", std::string());
        if (syms.empty())
            for (size_t i = 0; i < m.stationary.size(); ++i) syms.push_back((char)('0' + i));
        m.alphabet = Alphabet{syms};
        m.validate();
        return m;
    }
    if (kind == "periodic") {
        std::string w = j.at("word").get<std::string>();
        Alphabet a = j.contains("alphabet") ? Alphabet{j.at("alphabet").get<std::string>()}
                                            : alphabet_of_words({w, "01"});
        return PeriodicOrbitMeasure{a, w};
    }
    if (kind == "table") {
        CylinderTable t;
        t.depth = j.at("depth").get<int>();
        std::string syms = j.value("alphabet", std::string("01"));
        t.alphabet = Alphabet{syms};
        t.prob[""] = Rational(1);
        for (auto it = j.at("entries").begin(); it != j.at("entries").end(); ++it)
            t.prob[it.key()] = rat(it.value());
        t.check_invariants();
        return t;
    }
    throw std::invalid_argument("measure_from_json: unknown kind '" + kind + "'");
}

std::string measure_to_json(const MeasureSource& src) {
    json j;
    if (auto* b = std::get_if<BernoulliSpec>(&src)) {
        j["kind"] = "bernoulli";
        j["alphabet"] = b->alphabet.symbols;
        for (const auto& w : b->weights) j["weights"].push_back(w.str());
    } else if (auto* m = std::get_if<MarkovSpec>(&src)) {
        j["kind"] = "markov";
        j["alphabet"] = m->alphabet.symbols;
        for (const auto& row : m->transition) {
            json r = json::array();
            for (const auto& x : row) r.push_back(x.str());
            j["P"].push_back(r);
        }
        for (const auto& x : m->stationary) j["pi"].push_back(x.str());
    } else if (auto* p = std::get_if<PeriodicOrbitMeasure>(&src)) {
        j["kind"] = "periodic";
        j["alphabet"] = p->alphabet.symbols;
        j["word"] = p->word;
    } else {
        const auto& t = std::get<CylinderTable>(src);
        j["kind"] = "table";
        j["alphabet"] = t.alphabet.symbols;
        j["depth"] = t.depth;
        for (const auto& [w, p] : t.prob)
            if (!w.empty()) j["entries"][w] = p.str();
    }
    return j.dump(2);
}

TuringMachineSpec tm_from_json(const std::string& text) {
    json j = json::parse(text);
    TuringMachineSpec tm;
    for (const auto& s : j.at("states")) tm.states.push_back(s.get<std::string>());
    for (const auto& s : j.at("tape")) tm.tape_alphabet.push_back(s.get<std::string>());
    tm.blank = j.value("blank", std::string("#"));
    tm.initial = j.at("initial").get<std::string>();
    for (const auto& s : j.at("final")) tm.finals.push_back(s.get<std::string>());
    for (auto it = j.at("delta").begin(); it != j.at("delta").end(); ++it) {
        std::string key = it.key();
        auto comma = key.rfind(',');
        if (comma == std::string::npos) throw std::invalid_argument("tm delta key '" + key + "'");
        std::string q = key.substr(0, comma), sym = key.substr(comma + 1);
        const auto& v = it.value();
        std::string mv = v.at(2).get<std::string>();
        tm.delta[{q, sym}] = {v.at(0).get<std::string>(), v.at(1).get<std::string>(),
                              mv.empty() ? 'S' : mv[0]};
    }
    tm.validate();
    return tm;
}

std::string tm_to_json(const TuringMachineSpec& tm) {
    json j;
    j["states"] = tm.states;
    j["tape"] = tm.tape_alphabet;
    j["blank"] = tm.blank;
    j["initial"] = tm.initial;
    j["final"] = tm.finals;
    for (const auto& [k, v] : tm.delta)
        j["delta"][k.first + "," + k.second] = {std::get<0>(v), std::get<1>(v),
                                                std::string(1, std::get<2>(v))};
    return j.dump(2);
}

namespace {

Sigma2Descriptor descriptor_from_name(const std::string& name) {
    // "singleton:<word>" or "segment:<u>:<v>", over the binary alphabet
    Alphabet a = Alphabet::binary();
    auto colon = name.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("unknown descriptor '" + name + "'");
    std::string kind = name.substr(0, colon);
    std::string rest = name.substr(colon + 1);
    if (kind == "singleton") return Sigma2Descriptor::distance_to_segments(a, {{rest, rest}});
    if (kind == "segment") {
        auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw std::invalid_argument("segment descriptor needs u:v");
        return Sigma2Descriptor::distance_to_segments(a,
                                                      {{rest.substr(0, c2), rest.substr(c2 + 1)}});
    }
    throw std::invalid_argument("unknown descriptor '" + name + "'");
}

ProgramPtr program_from_json_obj(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "explicit") {
        std::vector<std::string> words = j.at("words").get<std::vector<std::string>>();
        long long cyc = j.value("cycle_from", (long long)0);
        Alphabet a = j.contains("alphabet") ? Alphabet{j.at("alphabet").get<std::string>()}
                                            : alphabet_of_words(words);
        return WordSequenceProgram::explicit_list(a, words, cyc);
    }
    if (kind == "alternating") {
        std::vector<std::string> words = j.at("words").get<std::vector<std::string>>();
        Alphabet a = j.contains("alphabet") ? Alphabet{j.at("alphabet").get<std::string>()}
                                            : alphabet_of_words(words);
        return WordSequenceProgram::alternating(a, words);
    }
    if (kind == "cover") {
        Sigma2Descriptor d = descriptor_from_name(j.at("descriptor").get<std::string>());
        return WordSequenceProgram::cover(d, j.value("budget", (long long)1000));
    }
    if (kind == "rice") {
        TuringMachineSpec tm;
        if (j.at("machine").is_string())
            tm = tm_from_json(read_file(j.at("machine").get<std::string>()));
        else
            tm = tm_from_json(j.at("machine").dump());
        return WordSequenceProgram::rice(tm, program_from_json_obj(j.at("halt_seq")),
                                         program_from_json_obj(j.at("loop_seq")));
    }
    if (kind == "padded") return pad_for_space(program_from_json_obj(j.at("inner")));
    throw std::invalid_argument("program_from_json: unknown kind '" + kind + "'");
}

}  // namespace

ProgramPtr program_from_json(const std::string& text) {
    return program_from_json_obj(json::parse(text));
}

AutomatonConfig automaton_from_json(const std::string& text) {
    json j = json::parse(text);
    AutomatonConfig cfg;
    if (j.at("B").is_string()) {
        cfg.B = Alphabet{j.at("B").get<std::string>()};
    } else {
        std::string syms;
        for (const auto& s : j.at("B")) syms += s.get<std::string>();
        cfg.B = Alphabet{syms};
    }
    cfg.q = j.value("q", 5);
    cfg.T0 = j.value("T0", (long long)2);
    const json& b = j.at("binding");
    std::string mode = b.value("mode", std::string("host"));
    cfg.binding.program = program_from_json_obj(b.at("sequence"));
    if (mode == "host") {
        cfg.binding.mode = SequenceProgramBinding::Mode::HostOracle;
    } else if (mode == "faithful") {
        cfg.binding.mode = SequenceProgramBinding::Mode::Faithful;
        std::string w1 = cfg.binding.program->word(1), w2 = cfg.binding.program->word(2);
        cfg.binding.machines = w1 == w2 ? faithful_default_machines(cfg.B, w1)
                                        : faithful_parity_machines(cfg.B, w2, w1);
        cfg.binding.faithful_horizon = b.value("horizon", (long long)8);
    } else {
        throw std::invalid_argument("automaton binding mode '" + mode + "'");
    }
    return cfg;
}

ExperimentFile experiment_from_json(const std::string& text) {
    json j = json::parse(text);
    std::string schema = j.value("schema", std::string());
    if (schema != "calim-experiment-v1")
        throw std::invalid_argument("experiment config: schema must be calim-experiment-v1");
    ExperimentFile f;
    f.automaton = automaton_from_json(j.at("automaton").dump());
    ExperimentConfig& e = f.experiment;
    e.L = j.value("L", 1024);
    e.S = j.value("S", 100);
    e.depth = j.value("depth", 4);
    if (j.contains("observe_times"))
        e.observe.explicit_times = j.at("observe_times").get<std::vector<long long>>();
    else
        e.observe.n_max = j.value("n_max", (long long)9);
    if (!j.contains("seed")) throw std::invalid_argument("experiment config: seed is required");
    e.seed = j.at("seed").get<uint64_t>();
    e.jobs = j.value("jobs", 1);
    if (j.contains("initial")) {
        const json& ini = j.at("initial");
        e.initial.init_weight = rat(ini.value("init", json("1/256")));
        e.initial.wall_weight = rat(ini.value("wall", json("1/256")));
        e.initial.full_junk = ini.value("full_junk", false);
    }
    if (j.contains("reference"))
        e.reference = program_from_json_obj(j.at("reference"));
    else
        e.reference = f.automaton.binding.program;
    return f;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

}  // namespace calim

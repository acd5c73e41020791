#include "doctest.h"

#include "calim/json_io.hpp"
#include "calim/measures.hpp"

using namespace calim;

namespace {

BernoulliSpec uniform2() {
    return BernoulliSpec{Alphabet::binary(), {Rational(1, 2), Rational(1, 2)}};
}

MarkovSpec sym_markov(Rational stay) {
    MarkovSpec m;
    m.alphabet = Alphabet::binary();
    Rational go = Rational(1) - stay;
    m.transition = {{stay, go}, {go, stay}};
    m.stationary = {Rational(1, 2), Rational(1, 2)};
    m.validate();
    return m;
}

// brute-force cyclic occurrence count, the independent oracle for periodic
// cylinder probabilities
Rational cyclic_freq(const std::string& w, const std::string& u) {
    long long hits = 0;
    for (size_t i = 0; i < w.size(); ++i) {
        bool ok = true;
        for (size_t k = 0; k < u.size(); ++k)
            if (w[(i + k) % w.size()] != u[k]) { ok = false; break; }
        if (ok) ++hits;
    }
    return Rational(hits, (long long)w.size());
}

}  // namespace

TEST_CASE("cylinder probabilities") {
    MeasureSource b = uniform2();
    CHECK(cylinder_prob(b, "01") == Rational(1, 4));
    CHECK(cylinder_prob(b, "") == Rational(1));

    MeasureSource p = PeriodicOrbitMeasure{Alphabet::binary(), "0011"};
    CHECK(cylinder_prob(p, "01") == cyclic_freq("0011", "01"));
    CHECK(cylinder_prob(p, "01") == Rational(1, 4));
    CHECK(cylinder_prob(p, "") == Rational(1));

    MeasureSource m = sym_markov(Rational(3, 4));
    CHECK(cylinder_prob(m, "00") == Rational(1, 2) * Rational(3, 4));

    CHECK_THROWS(cylinder_prob(b, "02"));
}

TEST_CASE("table depth errors") {
    CylinderTable t = table_of(uniform2(), 2);
    t.check_invariants();
    MeasureSource src = t;
    CHECK(cylinder_prob(src, "01") == Rational(1, 4));
    CHECK_THROWS_AS(cylinder_prob(src, "011"), std::out_of_range);
    CHECK_THROWS_AS(distance_truncated(src, uniform2(), 3), std::out_of_range);
}

TEST_CASE("truncated distance basics") {
    MeasureSource zero = PeriodicOrbitMeasure{Alphabet::binary(), "0"};
    MeasureSource one = PeriodicOrbitMeasure{Alphabet::binary(), "1"};
    auto same = distance_truncated(zero, zero, 5);
    CHECK(same.lower == Rational(0));
    CHECK(same.upper == Rational(1, 32));

    // each depth-n max difference is 1 for n >= 1; sum 2^-1..2^-4
    auto d = distance_truncated(zero, one, 4);
    CHECK(d.lower == Rational(15, 16));

    MeasureSource ab = PeriodicOrbitMeasure{Alphabet::binary(), "01"};
    MeasureSource ba = PeriodicOrbitMeasure{Alphabet::binary(), "10"};
    auto rot = distance_truncated(ab, ba, 6);
    CHECK(rot.lower == Rational(0));
}

TEST_CASE("metric axioms on sampled periodic triples") {
    // symmetry exact, triangle within 2*2^-N
    Rng rng(12345);
    Alphabet bin = Alphabet::binary();
    auto random_word = [&](int max_len) {
        int len = 1 + (int)rng.below(max_len);
        std::string w;
        for (int i = 0; i < len; ++i) w.push_back(rng.below(2) ? '1' : '0');
        return w;
    };
    const int N = 6;
    Rational slack = Rational(2) * Rational::dyadic(1, N);
    for (int trial = 0; trial < 100; ++trial) {
        MeasureSource a = PeriodicOrbitMeasure{bin, random_word(6)};
        MeasureSource b = PeriodicOrbitMeasure{bin, random_word(6)};
        MeasureSource c = PeriodicOrbitMeasure{bin, random_word(6)};
        auto dab = distance_truncated(a, b, N);
        auto dba = distance_truncated(b, a, N);
        CHECK(dab.lower == dba.lower);
        auto dac = distance_truncated(a, c, N);
        auto dcb = distance_truncated(c, b, N);
        CHECK(dab.lower <= dac.lower + dcb.lower + slack);
    }
}

TEST_CASE("rotation invariance of periodic measures") {
    const int N = 6;
    std::string w = "00110";
    for (size_t r = 1; r < w.size(); ++r) {
        std::string rot = w.substr(r) + w.substr(0, r);
        auto d = distance_truncated(MeasureSource(PeriodicOrbitMeasure{Alphabet::binary(), w}),
                                    MeasureSource(PeriodicOrbitMeasure{Alphabet::binary(), rot}),
                                    N);
        CHECK(d.lower == Rational(0));
    }
}

TEST_CASE("dist_to_segment endpoints and midpoint") {
    Alphabet bin = Alphabet::binary();
    PeriodicOrbitMeasure a{bin, "01"};
    PeriodicOrbitMeasure b{bin, "0011"};
    const int N = 5;
    // endpoint
    Rational d = dist_to_segment(MeasureSource(a), a, b, N);
    CHECK(d <= Rational::dyadic(1, N));
    // midpoint given as a table
    CylinderTable mid = mix_tables({{Rational(1, 2), table_of(MeasureSource(a), N)},
                                    {Rational(1, 2), table_of(MeasureSource(b), N)}});
    Rational dm = dist_to_segment(MeasureSource(mid), a, b, N);
    CHECK(dm <= Rational::dyadic(1, N));
    // degenerate segment: both endpoints the same measure
    PeriodicOrbitMeasure a2{bin, "10"};
    MeasureSource zero = PeriodicOrbitMeasure{bin, "0"};
    Rational dz = dist_to_segment(zero, a, a2, N);
    auto direct = distance_truncated(zero, MeasureSource(a), N);
    CHECK(dz >= direct.lower);
    CHECK(dz <= direct.upper);
}

TEST_CASE("psi mixing: bernoulli and degenerate markov are 0") {
    CHECK(psi_mixing_coeff(uniform2(), 1) == Rational(0));
    CHECK(psi_mixing_coeff(uniform2(), 3) == Rational(0));
    CHECK(psi_mixing_coeff(sym_markov(Rational(1, 2)), 1) == Rational(0));
    BernoulliSpec degen{Alphabet::binary(), {Rational(1), Rational(0)}};
    CHECK_THROWS_AS(psi_mixing_coeff(MeasureSource(degen), 1), std::invalid_argument);
    CHECK_THROWS_AS(psi_mixing_coeff(uniform2(), 0), std::invalid_argument);
}

// Brute-force oracle: sup over single-cylinder events A (ending at 0) and B
// (starting at gap n) of |mu(A cap B)/(mu(A)mu(B)) - 1|. For Markov chains the
// supremum over the generated sigma-algebras collapses to these atoms.
namespace {
Rational psi_brute(const MarkovSpec& m, int gap, int depth) {
    MeasureSource src = m;
    Rational best(0);
    std::vector<std::string> words;
    std::vector<std::string> cur{""};
    for (int n = 1; n <= depth; ++n) {
        std::vector<std::string> next;
        for (const auto& u : cur)
            for (char a : m.alphabet.symbols) next.push_back(u + a);
        words.insert(words.end(), next.begin(), next.end());
        cur = next;
    }
    for (const auto& a : words)
        for (const auto& b : words) {
            // A ends at position 0 and B starts at position gap, so gap-1
            // positions in between are free
            Rational joint(0);
            std::vector<std::string> mids{""};
            for (int i = 0; i < gap - 1; ++i) {
                std::vector<std::string> nx;
                for (const auto& u : mids)
                    for (char c : m.alphabet.symbols) nx.push_back(u + c);
                mids = nx;
            }
            for (const auto& mid : mids) joint += cylinder_prob(src, a + mid + b);
            Rational ratio = joint / (cylinder_prob(src, a) * cylinder_prob(src, b));
            Rational dev = (ratio - Rational(1)).abs();
            if (dev > best) best = dev;
        }
    return best;
}
}  // namespace

TEST_CASE("psi mixing equals brute-force cylinder supremum (oracle)") {
    // all 2-state full-support symmetric-and-asymmetric chains, denominators <= 8
    std::vector<MarkovSpec> chains;
    chains.push_back(sym_markov(Rational(3, 4)));
    chains.push_back(sym_markov(Rational(5, 8)));
    chains.push_back(sym_markov(Rational(1, 8)));
    {
        MarkovSpec m;  // asymmetric: pi = (2/3, 1/3)
        m.alphabet = Alphabet::binary();
        m.transition = {{Rational(3, 4), Rational(1, 4)}, {Rational(1, 2), Rational(1, 2)}};
        m.stationary = {Rational(2, 3), Rational(1, 3)};
        m.validate();
        chains.push_back(m);
    }
    for (const auto& m : chains)
        for (int gap = 1; gap <= 4; ++gap)
            CHECK(psi_mixing_coeff(MeasureSource(m), gap) == psi_brute(m, gap, 3));
}

TEST_CASE("psi for the symmetric 3/4 chain is 1/2 at gap 1") {
    // fixed from the brute-force oracle above: max |P(a,b)/pi(b) - 1| = 1/2
    CHECK(psi_mixing_coeff(MeasureSource(sym_markov(Rational(3, 4))), 1) == Rational(1, 2));
}

TEST_CASE("sample_ring determinism and degenerate weights") {
    BernoulliSpec degen{Alphabet{"ab"}, {Rational(1), Rational(0)}};
    CHECK(sample_ring(MeasureSource(degen), 5, 7) == "aaaaa");
    MeasureSource u = uniform2();
    CHECK(sample_ring(u, 100, 42) == sample_ring(u, 100, 42));
    CHECK(sample_ring(u, 100, 42) != sample_ring(u, 100, 43));

    std::string big = sample_ring(u, 10000, 1);
    double ones = std::count(big.begin(), big.end(), '1') / 10000.0;
    CHECK(ones > 0.48);
    CHECK(ones < 0.52);
}

TEST_CASE("markov ring sampling approximates transition statistics") {
    MarkovSpec m = sym_markov(Rational(3, 4));
    std::string r = sample_ring(MeasureSource(m), 20000, 5);
    long long stay = 0;
    for (size_t i = 0; i + 1 < r.size(); ++i) stay += r[i] == r[i + 1];
    double frac = (double)stay / (r.size() - 1);
    CHECK(frac > 0.72);
    CHECK(frac < 0.78);
}

TEST_CASE("empirical_measure counts cyclically and satisfies invariants") {
    Alphabet bin = Alphabet::binary();
    CylinderTable t = empirical_measure({"0101"}, 2, bin);
    t.check_invariants();
    CHECK(t.at("01") == Rational(1, 2));
    CHECK(t.at("00") == Rational(0));

    CylinderTable dirac = empirical_measure({std::string(16, '0')}, 3, bin);
    dirac.check_invariants();
    CHECK(dirac.at("000") == Rational(1));

    CylinderTable two = empirical_measure({"01", "10"}, 1, bin);
    CHECK(two.at("0") == Rational(1, 2));

    CHECK_THROWS(empirical_measure({"01"}, 3, bin));
}

TEST_CASE("empirical measure of a repeated periodic word equals the orbit measure") {
    Alphabet bin = Alphabet::binary();
    std::string w = "00110";
    std::string ring;
    for (int i = 0; i < 8; ++i) ring += w;
    CylinderTable t = empirical_measure({ring}, (int)w.size(), bin);
    MeasureSource p = PeriodicOrbitMeasure{bin, w};
    for (const auto& [u, prob] : t.prob)
        CHECK(prob == cylinder_prob(p, u));
}

TEST_CASE("measure JSON round trip") {
    MeasureSource m = sym_markov(Rational(3, 4));
    MeasureSource back = measure_from_json(measure_to_json(m));
    CHECK(cylinder_prob(back, "010") == cylinder_prob(m, "010"));

    MeasureSource p = PeriodicOrbitMeasure{Alphabet::binary(), "0011"};
    CHECK(cylinder_prob(measure_from_json(measure_to_json(p)), "01") == Rational(1, 4));

    MeasureSource t = table_of(uniform2(), 2);
    CHECK(cylinder_prob(measure_from_json(measure_to_json(t)), "11") == Rational(1, 4));

    MeasureSource b = measure_from_json(R"({"kind":"bernoulli","weights":["1/2","1/2"]})");
    CHECK(cylinder_prob(b, "0") == Rational(1, 2));
}

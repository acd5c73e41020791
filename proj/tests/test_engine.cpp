#include "doctest.h"

#include "calim/engine.hpp"

using namespace calim;

namespace {
const Alphabet bin = Alphabet::binary();
}

TEST_CASE("identity and shift rules") {
    RuleTable ident = RuleTable::identity(3);
    RingConfig cfg = ring_from_string("abc", Alphabet{"abc"});
    RingConfig out = step(ident, cfg);
    CHECK(ring_to_string(out, Alphabet{"abc"}) == "abc");
    CHECK(out.t == 1);

    // shift rule: output = right neighbor
    RuleTable shift = RuleTable::callback(3, 1, [](const cell_t* w) { return w[2]; });
    CHECK(ring_to_string(step(shift, cfg), Alphabet{"abc"}) == "bca");
}

TEST_CASE("rule 90 on a small ring") {
    RuleTable r90 = RuleTable::elementary(90);
    RingConfig cfg = ring_from_string("00100", bin);
    CHECK(ring_to_string(step(r90, cfg), bin) == "01010");

    // composition: iterate(T=2) equals step(step(.))
    RingConfig two = iterate(r90, cfg, 2, false, nullptr);
    CHECK(ring_to_string(two, bin) == ring_to_string(step(r90, step(r90, cfg)), bin));
}

TEST_CASE("full rotation returns the original ring") {
    RuleTable shift = RuleTable::callback(2, 1, [](const cell_t* w) { return w[2]; });
    RingConfig cfg = ring_from_string("0110100", bin);
    RingConfig out = iterate(shift, cfg, cfg.size(), false, nullptr);
    CHECK(out.cells == cfg.cells);
}

TEST_CASE("step commutes with rotation") {
    RuleTable r110 = RuleTable::elementary(110);
    RingConfig cfg = ring_from_string("0110101101", bin);
    RingConfig stepped = step(r110, cfg);
    // rotate then step == step then rotate
    RingConfig rot = cfg;
    std::rotate(rot.cells.begin(), rot.cells.begin() + 3, rot.cells.end());
    RingConfig a = step(r110, rot);
    RingConfig b = stepped;
    std::rotate(b.cells.begin(), b.cells.begin() + 3, b.cells.end());
    CHECK(a.cells == b.cells);
}

TEST_CASE("predecessors of rule 90") {
    RuleTable r90 = RuleTable::elementary(90);
    PredecessorSet p = predecessors(r90, "1", 1, bin);
    CHECK(p.members.size() == 4);  // x_-1 xor x_1 = 1: 4 of the 8 windows
    for (const auto& v : p.members) CHECK((v[0] != v[2]));

    RuleTable ident = RuleTable::callback(2, 1, [](const cell_t* w) { return w[1]; });
    PredecessorSet q = predecessors(ident, "01", 1, bin);
    CHECK(q.members.size() == 4);
    for (const auto& v : q.members) CHECK(v.substr(1, 2) == "01");

    CHECK_THROWS_AS(predecessors(r90, "0000000000", 10, bin), std::length_error);
}

TEST_CASE("Hedlund balance of surjective elementary rules") {
    for (int rule : {90, 102, 170}) {
        RuleTable r = RuleTable::elementary(rule);
        for (int len = 1; len <= 3; ++len) {
            std::vector<std::string> words{""};
            for (int i = 0; i < len; ++i) {
                std::vector<std::string> nx;
                for (const auto& u : words) { nx.push_back(u + "0"); nx.push_back(u + "1"); }
                words = nx;
            }
            size_t expect = predecessors(r, words[0], 1, bin).members.size();
            for (const auto& u : words)
                CHECK(predecessors(r, u, 1, bin).members.size() == expect);
        }
    }
}

TEST_CASE("exact pushforward") {
    MeasureSource uni = BernoulliSpec{bin, {Rational(1, 2), Rational(1, 2)}};
    RuleTable ident = RuleTable::callback(2, 1, [](const cell_t* w) { return w[1]; });
    CHECK(exact_pushforward(ident, uni, "01", 1) == Rational(1, 4));

    RuleTable shift = RuleTable::callback(2, 1, [](const cell_t* w) { return w[2]; });
    MeasureSource b34 = BernoulliSpec{bin, {Rational(1, 4), Rational(3, 4)}};
    CHECK(exact_pushforward(shift, b34, "1", 2) == Rational(3, 4));

    RuleTable r90 = RuleTable::elementary(90);
    CHECK(exact_pushforward(r90, uni, "1", 1) == Rational(1, 2));
}

TEST_CASE("pushforward of the uniform measure is a sigma-invariant measure") {
    MeasureSource uni = BernoulliSpec{bin, {Rational(1, 2), Rational(1, 2)}};
    for (int rule : {90, 102, 150, 170}) {
        RuleTable r = RuleTable::elementary(rule);
        // surjective rules preserve the uniform measure exactly
        for (const std::string& u : {"0", "1", "00", "01", "10", "11", "010", "1101"})
            CHECK(exact_pushforward(r, uni, u, 1) == cylinder_prob(uni, u));
    }
    // non-surjective rule 110 still produces an exact measure at depth 2
    RuleTable r110 = RuleTable::elementary(110);
    CylinderTable t;
    t.alphabet = bin;
    t.depth = 2;
    t.prob[""] = Rational(1);
    for (const std::string& u : {"0", "1", "00", "01", "10", "11"})
        t.prob[u] = exact_pushforward(r110, uni, u, 1);
    t.check_invariants();
}

TEST_CASE("trace capping strides instead of refusing") {
    RuleTable r90 = RuleTable::elementary(90);
    RingConfig cfg = ring_from_string(std::string(64, '0') + "1", bin);
    SpaceTimeTrace tr;
    iterate(r90, cfg, 100, true, &tr, 1000);
    CHECK(tr.stride > 1);
    CHECK((long long)tr.rows.size() * tr.width <= 1000 + tr.width);
    std::string pgm = trace_to_pgm(tr, 2);
    CHECK(pgm.substr(0, 2) == "P5");
}

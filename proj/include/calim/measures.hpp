#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "calim/rational.hpp"
#include "calim/rng.hpp"

namespace calim {

// Finite alphabet of single-character symbols. Symbols are ordered; words are
// plain std::strings over them.
struct Alphabet {
    std::string symbols;  // distinct characters, order fixed

    int size() const { return (int)symbols.size(); }
    int index_of(char c) const;
    bool contains(char c) const { return symbols.find(c) != std::string::npos; }
    bool valid_word(const std::string& w) const;

    static Alphabet binary() { return Alphabet{"01"}; }
};

// Depth-truncated shift-invariant measure: exact rational probability for
// every word of length <= depth. Invariants: prob("") == 1, values in [0,1],
// and both one-sided marginal consistencies (sigma-invariance at finite depth).
struct CylinderTable {
    Alphabet alphabet;
    int depth = 0;
    std::map<std::string, Rational> prob;

    Rational at(const std::string& u) const;
    void check_invariants() const;  // throws std::logic_error on violation
};

// Measure supported by the periodic orbit of a nonempty word.
struct PeriodicOrbitMeasure {
    Alphabet alphabet;
    std::string word;

    PeriodicOrbitMeasure() = default;
    PeriodicOrbitMeasure(Alphabet a, std::string w)
        : alphabet(std::move(a)), word(std::move(w)) {}

    Rational cylinder(const std::string& u) const;
    // counts of every length-n cyclic window, cached
    const std::unordered_map<std::string, long long>& window_counts(int n) const;

private:
    mutable std::shared_ptr<std::map<int, std::unordered_map<std::string, long long>>> cache_;
};

struct BernoulliSpec {
    Alphabet alphabet;
    std::vector<Rational> weights;  // one per symbol, sum to 1

    void validate() const;
    bool full_support() const;
};

struct MarkovSpec {
    Alphabet alphabet;
    std::vector<std::vector<Rational>> transition;  // row-stochastic
    std::vector<Rational> stationary;               // pi * P == pi

    void validate() const;  // checks stochasticity and stationarity exactly
    bool full_support() const;
};

// Tagged union over the four exact sources of cylinder probabilities.
using MeasureSource =
    std::variant<BernoulliSpec, MarkovSpec, PeriodicOrbitMeasure, CylinderTable>;

const Alphabet& source_alphabet(const MeasureSource& src);
// maximum depth the source answers, or nullopt when unbounded
std::optional<int> source_depth(const MeasureSource& src);

// --- operations -----------------------------------------------------------

// exact probability of the cylinder [u]
Rational cylinder_prob(const MeasureSource& src, const std::string& u);

// Truncated weak* distance: lower = sum_{n<=N} 2^-n max_u |mu[u]-nu[u]|,
// upper = lower + 2^-N. The true metric lies in [lower, upper].
struct DistanceInterval {
    Rational lower;
    Rational upper;
};
DistanceInterval distance_truncated(const MeasureSource& mu, const MeasureSource& nu, int N);

// Upper bound on the distance from mu to the segment [a,b], minimized over a
// dyadic grid of step 2^-grid_log2 in the mixture parameter.
Rational dist_to_segment(const MeasureSource& mu, const PeriodicOrbitMeasure& a,
                         const PeriodicOrbitMeasure& b, int N, int grid_log2 = 8);

// psi-mixing coefficient: 0 for Bernoulli; max_{a,b} |P^n(a,b)/pi(b) - 1| for
// full-support Markov chains.
Rational psi_mixing_coeff(const MeasureSource& spec, int n);

// Length-L ring sampled from a Bernoulli or Markov source; deterministic in seed.
std::string sample_ring(const MeasureSource& src, int L, uint64_t seed);

// Cyclic empirical word frequencies averaged over rings, as an exact table.
CylinderTable empirical_measure(const std::vector<std::string>& rings, int depth,
                                const Alphabet& alphabet);

// Convex mixture of cylinder tables (same alphabet/depth).
CylinderTable mix_tables(const std::vector<std::pair<Rational, CylinderTable>>& parts);

// Table of a source at the given depth.
CylinderTable table_of(const MeasureSource& src, int depth);

}  // namespace calim

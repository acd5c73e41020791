#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "calim/measures.hpp"
#include "calim/turing.hpp"

namespace calim {

// Covering radius alpha_k: every shift-invariant measure has a periodic-orbit
// measure of period <= k within alpha_k. Exactly rational (logs base |A| hit
// integers by construction); nullopt = +infinity sentinel for small k.
std::optional<Rational> alpha_k(int alphabet_size, long long k);

// Diagnostics of one de Bruijn build, kept for structural assertions.
struct DeBruijnBuild {
    int n = 0;
    long long total = 0;                       // |A|^{3n}
    std::map<std::string, long long> counts;   // p_w
    std::map<std::string, long long> repaired; // p'_w
    long long added_edges = 0;
    std::string word;                          // pi, the Eulerian readout
};

// Periodic word pi with |pi| <= |A|^{3n+1} and per-word frequency error
// <= |A|^-(2n - log_|A|(2n)) against the target at depth n.
DeBruijnBuild debruijn_periodic_approx(const MeasureSource& target, int n);

// Prop-2.1-style f(n): the smallest-depth de Bruijn word whose distance bound
// is <= 2^-n.
std::string approximate_computable_measure(const MeasureSource& target, int n);
// the depth m(n) that approximate_computable_measure uses
int debruijn_depth_for_precision(int alphabet_size, int n);

// --- Sigma_2 descriptors and the polygonal cover ---------------------------

// a(n,m,w) approximates f_n(orbit measure of w) within 1/m; b(m) a modulus.
struct Sigma2Descriptor {
    Alphabet alphabet;
    std::function<Rational(long long n, long long m, const std::string& w)> a;
    std::function<Rational(long long m)> b;

    // Distance-to-set descriptor for a finite union of segments between
    // periodic-orbit measures (a singleton is one degenerate segment).
    // Evaluations are capped at eval_depth_cap: the shipped experiments keep
    // every tolerance far above 2^-8, so deeper truncation buys nothing.
    static Sigma2Descriptor distance_to_segments(
        const Alphabet& alpha,
        std::vector<std::pair<std::string, std::string>> segments, int eval_depth_cap = 8);
};

struct CoverState {
    long long t = 0;
    // V_k^t, monotone in t per k
    std::map<long long, std::set<std::string>> V;
    std::vector<std::string> emitted;
    std::vector<std::string> log;  // inconclusive-comparison diagnostics
};

// Runs the enumeration to time budget_t; returns the emitted word prefix.
// Each distinct word is appended at most once (with its connecting path).
CoverState polygonal_cover(const Sigma2Descriptor& desc, long long budget_t,
                           int word_len_cap = 6);

// --- word-sequence programs -------------------------------------------------

class WordSequenceProgram;
using ProgramPtr = std::shared_ptr<const WordSequenceProgram>;

class WordSequenceProgram {
public:
    virtual ~WordSequenceProgram() = default;
    virtual std::string word(long long n) const = 0;  // deterministic
    virtual const Alphabet& alphabet() const = 0;

    static ProgramPtr explicit_list(Alphabet alpha, std::vector<std::string> words,
                                    long long cycle_from);
    static ProgramPtr alternating(Alphabet alpha, std::vector<std::string> words);
    static ProgramPtr generated(Alphabet alpha, std::function<std::string(long long)> f);
    static ProgramPtr cover(const Sigma2Descriptor& desc, long long budget_hint);
    // seqA once the machine has halted within n steps, seqB before
    static ProgramPtr rice(TuringMachineSpec machine, ProgramPtr halt_seq, ProgramPtr loop_seq);
    static ProgramPtr padded(ProgramPtr inner);  // pad_for_space
    static ProgramPtr interleaved(ProgramPtr seqW, ProgramPtr seqWp, const Sigma2Descriptor& desc);
};

std::string rice_reduction(const TuringMachineSpec& machine, const WordSequenceProgram& seqA,
                           const WordSequenceProgram& seqB, long long n);

ProgramPtr pad_for_space(ProgramPtr seq);

// w''_n of the Cesaro interleaving; exposed standalone for block tests
std::string cesaro_interleave(const WordSequenceProgram& seqW, const WordSequenceProgram& seqWp,
                              const Sigma2Descriptor& desc, long long n);

// internals of one Cesaro block, exposed for the block-arithmetic assertions
struct CesaroBlock {
    long long i = 0;
    long long block_start = 0;  // |A|^{i^2}
    long long block_end = 0;    // |A|^{(i+1)^2}
    std::vector<std::string> path;  // P_i
};
CesaroBlock cesaro_block(const WordSequenceProgram& seqW, const WordSequenceProgram& seqWp,
                         const Sigma2Descriptor& desc, long long i);

// Sampled points of the polygonal path over [from, to), as depth tables.
// grid = number of subdivisions per segment (1 = endpoints only).
std::vector<CylinderTable> limit_set_points(const WordSequenceProgram& seq, long long from,
                                            long long to, int grid, int depth);

}  // namespace calim

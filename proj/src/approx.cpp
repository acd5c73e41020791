#include "calim/approx.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>

namespace calim {

namespace {

// largest e >= 0 with s^e <= k
int ilog(int s, long long k) {
    int e = 0;
    __int128 p = s;
    while (p <= k) {
        ++e;
        p *= s;
    }
    return e;
}

long long ipow(int s, int e) {
    long long p = 1;
    for (int i = 0; i < e; ++i) {
        if (p > (1LL << 56)) throw std::overflow_error("ipow overflow");
        p *= s;
    }
    return p;
}

}  // namespace

std::optional<Rational> alpha_k(int alphabet_size, long long k) {
    if (alphabet_size < 2 || k < 1) throw std::invalid_argument("alpha_k: bad arguments");
    // floor((log_s k - 1)/3) equals floor((ilog - 1)/3); the fractional part of
    // log_s k never crosses the floor boundary (denominator 3 vs unit steps)
    int m = (ilog(alphabet_size, k) - 1) / 3;
    if (ilog(alphabet_size, k) < 1 || m <= 0) return std::nullopt;  // infinity sentinel
    // s^(-m + log_s(2m)) == 2m * s^-m, exactly rational
    return Rational(2 * m, ipow(alphabet_size, m));
}

// --- de Bruijn construction -------------------------------------------------

namespace {

std::vector<std::string> all_words(const Alphabet& alpha, int n) {
    std::vector<std::string> out{""};
    for (int i = 0; i < n; ++i) {
        std::vector<std::string> next;
        next.reserve(out.size() * alpha.size());
        for (const auto& u : out)
            for (char a : alpha.symbols) next.push_back(u + a);
        out = std::move(next);
    }
    return out;
}

}  // namespace

DeBruijnBuild debruijn_periodic_approx(const MeasureSource& target, int n) {
    const Alphabet& alpha = source_alphabet(target);
    int s = alpha.size();
    if (n < 1) throw std::invalid_argument("debruijn: n >= 1");
    if (auto d = source_depth(target); d && *d < n)
        throw std::out_of_range("debruijn: target depth unavailable");
    long long M = ipow(s, 3 * n);
    if (M > (1LL << 24)) throw std::length_error("debruijn: |A|^{3n} beyond budget");

    // sigma-invariance at depth n (both marginals), exact
    for (const auto& u : all_words(alpha, n - 1)) {
        Rational base = cylinder_prob(target, u);
        Rational right(0), left(0);
        for (char a : alpha.symbols) {
            right += cylinder_prob(target, u + a);
            left += cylinder_prob(target, a + u);
        }
        if (right != base || left != base)
            throw std::invalid_argument("debruijn: target not sigma-invariant at depth " +
                                        std::to_string(n));
    }

    DeBruijnBuild build;
    build.n = n;
    build.total = M;

    // round mu([w])*M to integers summing to M, largest remainder first
    std::vector<std::string> words = all_words(alpha, n);
    std::vector<long long> p(words.size());
    std::vector<std::pair<Rational, size_t>> rem;
    long long assigned = 0;
    for (size_t i = 0; i < words.size(); ++i) {
        Rational scaled = cylinder_prob(target, words[i]) * Rational(M);
        long long fl = scaled.num() / scaled.den();
        p[i] = fl;
        assigned += fl;
        rem.push_back({scaled - Rational(fl), i});
    }
    std::sort(rem.begin(), rem.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return b.first < a.first;
        return words[a.second] < words[b.second];
    });
    for (long long r = M - assigned, i = 0; r > 0; --r, ++i) ++p[rem[i].second];
    for (size_t i = 0; i < words.size(); ++i) build.counts[words[i]] = p[i];

    // multigraph on A^{n-1}; edge w = u.b goes from prefix(w) to suffix(w)
    std::vector<std::string> nodes = all_words(alpha, n - 1);
    std::map<std::string, int> node_id;
    for (size_t i = 0; i < nodes.size(); ++i) node_id[nodes[i]] = (int)i;
    auto edge_from = [&](const std::string& w) { return node_id[w.substr(0, n - 1)]; };
    auto edge_to = [&](const std::string& w) { return node_id[w.substr(1)]; };

    std::vector<long long> pp = p;
    auto degree = [&](std::vector<long long>& out_deg, std::vector<long long>& in_deg) {
        out_deg.assign(nodes.size(), 0);
        in_deg.assign(nodes.size(), 0);
        for (size_t i = 0; i < words.size(); ++i) {
            out_deg[edge_from(words[i])] += pp[i];
            in_deg[edge_to(words[i])] += pp[i];
        }
    };

    std::map<std::string, size_t> word_id;
    for (size_t i = 0; i < words.size(); ++i) word_id[words[i]] = i;
    auto add_path = [&](int u, int v) {
        // walk from u to v shifting in v's letters, one new edge per step
        std::string cur = nodes[u];
        const std::string& goal = nodes[v];
        if (n == 1) return;  // single node, nothing to connect
        for (int i = 0; i < n - 1; ++i) {
            char c = goal[i];
            std::string w = cur + c;
            ++pp[word_id[w]];
            ++build.added_edges;
            cur = w.substr(1);
        }
    };

    // balance imbalances
    while (true) {
        std::vector<long long> out_deg, in_deg;
        degree(out_deg, in_deg);
        int u = -1, v = -1;
        for (size_t i = 0; i < nodes.size(); ++i) {
            long long imb = out_deg[i] - in_deg[i];
            if (imb < 0 && u < 0) u = (int)i;
            if (imb > 0 && v < 0) v = (int)i;
        }
        if (u < 0 && v < 0) break;
        if (u < 0 || v < 0) throw std::logic_error("debruijn: inconsistent imbalance");
        add_path(u, v);
    }

    // connect support components (undirected sense); balanced additions both ways
    while (true) {
        std::vector<long long> out_deg, in_deg;
        degree(out_deg, in_deg);
        std::vector<int> comp(nodes.size(), -1);
        int ncomp = 0;
        for (size_t st = 0; st < nodes.size(); ++st) {
            if (comp[st] >= 0 || out_deg[st] + in_deg[st] == 0) continue;
            std::deque<int> q{(int)st};
            comp[st] = ncomp;
            while (!q.empty()) {
                int x = q.front();
                q.pop_front();
                for (size_t i = 0; i < words.size(); ++i) {
                    if (pp[i] == 0) continue;
                    int a = edge_from(words[i]), b = edge_to(words[i]);
                    if (a == x && comp[b] < 0) { comp[b] = ncomp; q.push_back(b); }
                    if (b == x && comp[a] < 0) { comp[a] = ncomp; q.push_back(a); }
                }
            }
            ++ncomp;
        }
        if (ncomp <= 1) break;
        int root = -1, other = -1;
        for (size_t i = 0; i < nodes.size() && other < 0; ++i) {
            if (comp[i] < 0) continue;
            if (root < 0) root = (int)i;
            else if (comp[i] != comp[root]) other = (int)i;
        }
        add_path(root, other);
        add_path(other, root);
    }
    for (size_t i = 0; i < words.size(); ++i) build.repaired[words[i]] = pp[i];

    // Hierholzer from the lexicographically smallest node with an out-edge
    std::vector<std::vector<std::pair<int, size_t>>> adj(nodes.size());  // (to, word idx)
    for (size_t i = 0; i < words.size(); ++i)
        if (pp[i] > 0) adj[edge_from(words[i])].push_back({edge_to(words[i]), i});
    for (auto& a : adj)
        std::sort(a.begin(), a.end(),
                  [&](const auto& x, const auto& y) { return words[x.second] < words[y.second]; });
    std::vector<long long> remaining = pp;
    int start = -1;
    for (size_t i = 0; i < nodes.size() && start < 0; ++i)
        if (!adj[i].empty()) start = (int)i;
    if (start < 0) throw std::logic_error("debruijn: empty graph");

    std::vector<size_t> next_slot(nodes.size(), 0);
    std::vector<std::pair<int, char>> stack{{start, 0}};  // (node, label that led here)
    std::string circuit;
    while (!stack.empty()) {
        int x = stack.back().first;
        bool advanced = false;
        while (next_slot[x] < adj[x].size()) {
            auto [to, wi] = adj[x][next_slot[x]];
            if (remaining[wi] > 0) {
                --remaining[wi];
                stack.push_back({to, words[wi].back()});
                advanced = true;
                break;
            }
            ++next_slot[x];
        }
        if (!advanced) {
            if (stack.size() > 1) circuit.push_back(stack.back().second);
            stack.pop_back();
        }
    }
    std::reverse(circuit.begin(), circuit.end());
    long long expected = 0;
    for (size_t i = 0; i < words.size(); ++i) expected += pp[i];
    if ((long long)circuit.size() != expected)
        throw std::logic_error("debruijn: graph not Eulerian after repair");
    build.word = std::move(circuit);
    return build;
}

int debruijn_depth_for_precision(int alphabet_size, int n) {
    // smallest m with 2m * s^-m <= 2^-n (the Prop-2.2 distance bound)
    for (int m = 2; m < 60; ++m) {
        if (Rational(2 * m, ipow(alphabet_size, m)) <= Rational::dyadic(1, n)) return m;
    }
    throw std::logic_error("debruijn_depth_for_precision: no depth found");
}

std::string approximate_computable_measure(const MeasureSource& target, int n) {
    int m = debruijn_depth_for_precision(source_alphabet(target).size(), n);
    return debruijn_periodic_approx(target, m).word;
}

// --- Sigma_2 descriptors ----------------------------------------------------

Sigma2Descriptor Sigma2Descriptor::distance_to_segments(
    const Alphabet& alpha, std::vector<std::pair<std::string, std::string>> segments,
    int eval_depth_cap) {
    if (segments.empty()) throw std::invalid_argument("descriptor: no segments");
    Sigma2Descriptor d;
    d.alphabet = alpha;
    auto cache = std::make_shared<std::map<std::pair<std::string, int>, Rational>>();
    auto segs = std::make_shared<std::vector<std::pair<std::string, std::string>>>(
        std::move(segments));
    Alphabet al = alpha;
    d.a = [cache, segs, al, eval_depth_cap](long long n, long long /*m*/,
                                            const std::string& w) -> Rational {
        int depth = (int)std::min<long long>(std::max<long long>(n, 2), eval_depth_cap);
        auto key = std::make_pair(w, depth);
        if (auto it = cache->find(key); it != cache->end()) return it->second;
        PeriodicOrbitMeasure pw{al, w};
        Rational best;
        bool first = true;
        for (const auto& [u, v] : *segs) {
            Rational r;
            if (u == v) {
                r = distance_truncated(MeasureSource(pw),
                                       MeasureSource(PeriodicOrbitMeasure{al, u}), depth)
                        .lower;
            } else {
                r = dist_to_segment(MeasureSource(pw), PeriodicOrbitMeasure{al, u},
                                    PeriodicOrbitMeasure{al, v}, depth, 5);
            }
            if (first || r < best) { best = r; first = false; }
        }
        return (*cache)[key] = best;
    };
    d.b = [](long long m) { return Rational(1, std::max<long long>(m, 1)); };
    return d;
}

// --- polygonal cover --------------------------------------------------------

namespace {

// representative k values where the threshold 2*alpha_k or the length cap
// changes: 1..cap individually, then s^(3j+1)
std::vector<long long> alpha_representatives(int s, long long budget, int word_len_cap) {
    std::vector<long long> ks;
    for (long long k = 1; k <= std::min<long long>(word_len_cap, budget); ++k) ks.push_back(k);
    for (int j = 1;; ++j) {
        long long k;
        try {
            k = ipow(s, 3 * j + 1);
        } catch (const std::overflow_error&) {
            break;
        }
        if (k > budget) break;
        if (k > word_len_cap) ks.push_back(k);
    }
    return ks;
}

std::vector<std::string> words_up_to(const Alphabet& alpha, int cap) {
    std::vector<std::string> out;
    for (int n = 1; n <= cap; ++n)
        for (const auto& w : all_words(alpha, n)) out.push_back(w);
    return out;
}

struct BallGraph {
    // pairwise interval distances between periodic measures of small words
    const Alphabet alpha;
    int depth;
    std::map<std::pair<std::string, std::string>, DistanceInterval> cache;
    std::vector<std::string>* log = nullptr;

    DistanceInterval dist(const std::string& u, const std::string& v) {
        auto key = u <= v ? std::make_pair(u, v) : std::make_pair(v, u);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        DistanceInterval d = distance_truncated(MeasureSource(PeriodicOrbitMeasure{alpha, key.first}),
                                                MeasureSource(PeriodicOrbitMeasure{alpha, key.second}),
                                                depth);
        return cache[key] = d;
    }

    // true when certainly <= r; inconclusive straddles are treated as false
    bool certainly_within(const std::string& u, const std::string& v,
                          const std::optional<Rational>& r) {
        if (!r) return true;  // infinite radius
        DistanceInterval d = dist(u, v);
        if (d.upper <= *r) return true;
        if (d.lower <= *r && log)
            log->push_back("inconclusive ball edge " + u + "~" + v + " at r=" + r->str());
        return false;
    }

    // shortest ball-chain through `nodes` from a word near `from` to a word
    // near `to`; empty optional when not connected at this radius
    std::optional<std::vector<std::string>> path(const std::vector<std::string>& nodes,
                                                 const std::string& from, const std::string& to,
                                                 const std::optional<Rational>& radius) {
        if (!radius) return std::vector<std::string>{};  // one infinite ball
        if (certainly_within(from, to, *radius + *radius))
            return std::vector<std::string>{};  // direct segment inside the tube
        int m = (int)nodes.size();
        std::vector<int> srcs, dsts;
        for (int i = 0; i < m; ++i) {
            if (certainly_within(nodes[i], from, radius)) srcs.push_back(i);
            if (certainly_within(nodes[i], to, radius)) dsts.push_back(i);
        }
        if (srcs.empty() || dsts.empty()) return std::nullopt;
        std::vector<int> prev(m, -2);
        std::deque<int> q;
        for (int sdx : srcs) { prev[sdx] = -1; q.push_back(sdx); }
        Rational two_r = *radius + *radius;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (int y = 0; y < m; ++y) {
                if (prev[y] != -2 || y == x) continue;
                if (certainly_within(nodes[x], nodes[y], two_r)) { prev[y] = x; q.push_back(y); }
            }
        }
        for (int ddx : dsts) {
            if (prev[ddx] == -2) continue;
            std::vector<std::string> p;
            for (int x = ddx; x != -1; x = prev[x]) p.push_back(nodes[x]);
            std::reverse(p.begin(), p.end());
            return p;
        }
        return std::nullopt;
    }
};

}  // namespace

CoverState polygonal_cover(const Sigma2Descriptor& desc, long long budget_t, int word_len_cap) {
    CoverState st;
    if (budget_t <= 0) return st;
    const Alphabet& alpha = desc.alphabet;
    int s = alpha.size();
    std::vector<long long> reps = alpha_representatives(s, budget_t, word_len_cap);
    std::vector<std::string> candidates = words_up_to(alpha, word_len_cap);
    std::set<std::string> emitted_set;
    BallGraph balls{alpha, 12, {}, &st.log};

    // membership of w in V_k is time-independent once t >= k here: the
    // approximator is evaluated at the window's low end t' = k
    auto member = [&](const std::string& w, long long k) {
        if ((long long)w.size() > std::min<long long>(k, word_len_cap)) return false;
        auto ak = alpha_k(s, k);
        if (!ak) return true;  // threshold 2*alpha infinite
        return desc.a(k, std::max<long long>(k, 1), w) < *ak + *ak;
    };

    auto emit_with_path = [&](const std::string& w, long long k_in_force) {
        if (!st.emitted.empty()) {
            const std::string& last = st.emitted.back();
            // maximal representative i <= k whose ball union connects last and w
            for (auto it = reps.rbegin(); it != reps.rend(); ++it) {
                long long i = *it;
                if (i > k_in_force) continue;
                std::vector<std::string> vi;
                for (const auto& c : candidates)
                    if (member(c, i)) vi.push_back(c);
                auto p = balls.path(vi, last, w, alpha_k(s, i));
                if (p) {
                    for (const auto& node : *p)
                        if (node != last && node != w) st.emitted.push_back(node);
                    break;
                }
            }
        }
        st.emitted.push_back(w);
        emitted_set.insert(w);
    };

    // The shipped descriptors evaluate the V-condition at the window's low end
    // t' = k, which is t-independent, so each V_k fills exactly when it first
    // materializes at t = k and stays constant afterwards (monotone by
    // construction).
    for (long long t = 1; t <= budget_t; ++t) {
        st.t = t;
        for (long long k : reps) {
            if (k > t) break;
            if (k < t) continue;
            auto& vk = st.V[k];
            for (const auto& w : candidates) {
                if (vk.count(w) || !member(w, k)) continue;
                vk.insert(w);
                if (!emitted_set.count(w)) emit_with_path(w, k);
            }
        }
    }
    return st;
}

// --- word sequence programs -------------------------------------------------

namespace {

class ExplicitProgram : public WordSequenceProgram {
public:
    ExplicitProgram(Alphabet a, std::vector<std::string> w, long long cyc)
        : alpha_(std::move(a)), words_(std::move(w)), cycle_from_(cyc) {
        if (words_.empty()) throw std::invalid_argument("explicit program: no words");
        if (cycle_from_ < 0 || cycle_from_ >= (long long)words_.size())
            throw std::invalid_argument("explicit program: bad cycle_from");
        for (const auto& x : words_)
            if (!alpha_.valid_word(x)) throw std::invalid_argument("program word off-alphabet");
    }
    std::string word(long long n) const override {
        if (n < (long long)words_.size()) return words_[std::max<long long>(n, 0)];
        long long span = (long long)words_.size() - cycle_from_;
        return words_[cycle_from_ + (n - (long long)words_.size()) % span];
    }
    const Alphabet& alphabet() const override { return alpha_; }

private:
    Alphabet alpha_;
    std::vector<std::string> words_;
    long long cycle_from_;
};

class GeneratedProgram : public WordSequenceProgram {
public:
    GeneratedProgram(Alphabet a, std::function<std::string(long long)> f)
        : alpha_(std::move(a)), f_(std::move(f)) {}
    std::string word(long long n) const override { return f_(std::max<long long>(n, 0)); }
    const Alphabet& alphabet() const override { return alpha_; }

private:
    Alphabet alpha_;
    std::function<std::string(long long)> f_;
};

class CoverProgram : public WordSequenceProgram {
public:
    CoverProgram(Sigma2Descriptor d, long long hint) : desc_(std::move(d)), budget_(hint) {}
    std::string word(long long n) const override {
        std::lock_guard<std::mutex> lock(mu_);
        while ((long long)emitted_.size() <= n) {
            CoverState st = polygonal_cover(desc_, budget_);
            if ((long long)st.emitted.size() > (long long)emitted_.size()) {
                emitted_ = st.emitted;
            }
            if ((long long)emitted_.size() <= n) {
                if (emitted_.empty())
                    throw std::runtime_error("cover program emitted nothing within budget");
                // cover enumerations are finite at desk scale; repeat the tail
                emitted_.push_back(emitted_.back());
            }
        }
        return emitted_[n];
    }
    const Alphabet& alphabet() const override { return desc_.alphabet; }

private:
    Sigma2Descriptor desc_;
    long long budget_;
    mutable std::mutex mu_;
    mutable std::vector<std::string> emitted_;
};

class RiceProgram : public WordSequenceProgram {
public:
    RiceProgram(TuringMachineSpec tm, ProgramPtr a, ProgramPtr b)
        : tm_(std::move(tm)), halt_(std::move(a)), loop_(std::move(b)) {
        if (halt_->alphabet().symbols != loop_->alphabet().symbols)
            throw std::invalid_argument("rice: sequence alphabets differ");
    }
    std::string word(long long n) const override {
        return rice_reduction(tm_, *halt_, *loop_, n);
    }
    const Alphabet& alphabet() const override { return halt_->alphabet(); }

private:
    TuringMachineSpec tm_;
    ProgramPtr halt_;
    ProgramPtr loop_;
};

class PaddedProgram : public WordSequenceProgram {
public:
    explicit PaddedProgram(ProgramPtr inner) : inner_(std::move(inner)) { r_.push_back(0); }
    std::string word(long long n) const override { return inner_->word(index(n)); }
    const Alphabet& alphabet() const override { return inner_->alphabet(); }

    long long index(long long n) const {
        if (n < 0) n = 0;
        std::lock_guard<std::mutex> lock(mu_);
        while ((long long)r_.size() <= n) {
            long long m = (long long)r_.size();
            long long sq = (long long)std::floor(std::sqrt((double)m));
            while ((sq + 1) * (sq + 1) <= m) ++sq;      // exact integer sqrt
            long long cand = r_.back() + 1;
            // advance only when the next word fits the space bound and the
            // cumulative budget (index <= sqrt(m)) allows it
            if (cand <= sq && (long long)inner_->word(cand).size() <= sq)
                r_.push_back(cand);
            else
                r_.push_back(r_.back());
        }
        return r_[n];
    }

private:
    ProgramPtr inner_;
    mutable std::mutex mu_;
    mutable std::vector<long long> r_;
};

class InterleavedProgram : public WordSequenceProgram {
public:
    InterleavedProgram(ProgramPtr w, ProgramPtr wp, Sigma2Descriptor d)
        : w_(std::move(w)), wp_(std::move(wp)), desc_(std::move(d)) {
        if (w_->alphabet().symbols != wp_->alphabet().symbols)
            throw std::invalid_argument("interleave: sequence alphabets differ");
    }
    std::string word(long long n) const override {
        return cesaro_interleave(*w_, *wp_, desc_, n);
    }
    const Alphabet& alphabet() const override { return w_->alphabet(); }

private:
    ProgramPtr w_;
    ProgramPtr wp_;
    Sigma2Descriptor desc_;
};

}  // namespace

ProgramPtr WordSequenceProgram::explicit_list(Alphabet alpha, std::vector<std::string> words,
                                              long long cycle_from) {
    return std::make_shared<ExplicitProgram>(std::move(alpha), std::move(words), cycle_from);
}
ProgramPtr WordSequenceProgram::alternating(Alphabet alpha, std::vector<std::string> words) {
    return std::make_shared<ExplicitProgram>(std::move(alpha), std::move(words), 0);
}
ProgramPtr WordSequenceProgram::generated(Alphabet alpha, std::function<std::string(long long)> f) {
    return std::make_shared<GeneratedProgram>(std::move(alpha), std::move(f));
}
ProgramPtr WordSequenceProgram::cover(const Sigma2Descriptor& desc, long long budget_hint) {
    return std::make_shared<CoverProgram>(desc, budget_hint);
}
ProgramPtr WordSequenceProgram::rice(TuringMachineSpec tm, ProgramPtr a, ProgramPtr b) {
    return std::make_shared<RiceProgram>(std::move(tm), std::move(a), std::move(b));
}
ProgramPtr WordSequenceProgram::padded(ProgramPtr inner) {
    return std::make_shared<PaddedProgram>(std::move(inner));
}
ProgramPtr WordSequenceProgram::interleaved(ProgramPtr w, ProgramPtr wp,
                                            const Sigma2Descriptor& desc) {
    return std::make_shared<InterleavedProgram>(std::move(w), std::move(wp), desc);
}

std::string rice_reduction(const TuringMachineSpec& machine, const WordSequenceProgram& seqA,
                           const WordSequenceProgram& seqB, long long n) {
    TmRunResult r = run_tm(machine, {}, n);
    return r.halted ? seqA.word(n) : seqB.word(n);
}

ProgramPtr pad_for_space(ProgramPtr seq) { return WordSequenceProgram::padded(std::move(seq)); }

CesaroBlock cesaro_block(const WordSequenceProgram& seqW, const WordSequenceProgram& seqWp,
                         const Sigma2Descriptor& desc, long long i) {
    const Alphabet& alpha = seqW.alphabet();
    int s = alpha.size();
    CesaroBlock blk;
    blk.i = i;
    blk.block_start = ipow(s, (int)(i * i));
    blk.block_end = ipow(s, (int)((i + 1) * (i + 1)));
    std::string wpi = seqWp.word(i);
    std::string wi = seqW.word(i);
    std::string wpn = seqWp.word(i + 1);

    std::vector<std::string> log;
    BallGraph balls{alpha, 12, {}, &log};
    std::vector<std::string> candidates = words_up_to(alpha, 6);
    long long budget = 64;
    while (true) {
        std::vector<long long> reps = alpha_representatives(s, budget, 6);
        // maximal representative with one component containing all three
        for (auto it = reps.rbegin(); it != reps.rend(); ++it) {
            long long ni = *it;
            auto radius = alpha_k(s, ni);
            std::vector<std::string> vi;
            for (const auto& c : candidates) {
                if ((long long)c.size() > std::min<long long>(ni, 6)) continue;
                if (!radius || desc.a(ni, std::max<long long>(ni, 1), c) < *radius + *radius)
                    vi.push_back(c);
            }
            auto p1 = balls.path(vi, wpi, wi, radius);
            if (!p1) continue;
            auto p2 = balls.path(vi, wi, wpn, radius);
            if (!p2) continue;
            auto push = [&](const std::string& x) {
                if (blk.path.empty() || blk.path.back() != x) blk.path.push_back(x);
            };
            push(wpi);
            for (const auto& x : *p1) push(x);
            push(wi);
            for (const auto& x : *p2) push(x);
            push(wpn);
            return blk;
        }
        budget *= 2;  // blocking retry with doubling; never emit a wrong word
        if (budget > (1LL << 40)) throw std::runtime_error("cesaro: path not found");
    }
}

std::string cesaro_interleave(const WordSequenceProgram& seqW, const WordSequenceProgram& seqWp,
                              const Sigma2Descriptor& desc, long long n) {
    const Alphabet& alpha = seqW.alphabet();
    int s = alpha.size();
    if (n < 1) return seqWp.word(0);
    long long i = 0;
    while (ipow(s, (int)((i + 1) * (i + 1))) <= n) ++i;
    CesaroBlock blk = cesaro_block(seqW, seqWp, desc, i);
    long long off = n - blk.block_start;
    if (off < (long long)blk.path.size()) return blk.path[off];
    return seqWp.word(i + 1);
}

std::vector<CylinderTable> limit_set_points(const WordSequenceProgram& seq, long long from,
                                            long long to, int grid, int depth) {
    if (from > to) throw std::invalid_argument("limit_set_points: from > to");
    if (grid < 1) throw std::invalid_argument("limit_set_points: grid >= 1");
    const Alphabet& alpha = seq.alphabet();
    std::vector<CylinderTable> out;
    for (long long n = from; n < to; ++n) {
        CylinderTable a = table_of(MeasureSource(PeriodicOrbitMeasure{alpha, seq.word(n)}), depth);
        CylinderTable b =
            table_of(MeasureSource(PeriodicOrbitMeasure{alpha, seq.word(n + 1)}), depth);
        for (int j = 0; j <= grid; ++j) {
            Rational t(j, grid);
            out.push_back(mix_tables({{Rational(1) - t, a}, {t, b}}));
        }
    }
    if (from == to)
        out.push_back(table_of(MeasureSource(PeriodicOrbitMeasure{alpha, seq.word(from)}), depth));
    return out;
}

}  // namespace calim

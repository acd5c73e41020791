#include "calim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace calim {

int Alphabet::index_of(char c) const {
    auto p = symbols.find(c);
    if (p == std::string::npos)
        throw std::invalid_argument(std::string("symbol '") + c + "' not in alphabet " + symbols);
    return (int)p;
}

bool Alphabet::valid_word(const std::string& w) const {
    return std::all_of(w.begin(), w.end(), [&](char c) { return contains(c); });
}

Rational CylinderTable::at(const std::string& u) const {
    if ((int)u.size() > depth)
        throw std::out_of_range("CylinderTable: depth exceeded for word '" + u + "'");
    auto it = prob.find(u);
    if (it == prob.end()) return Rational(0);
    return it->second;
}

void CylinderTable::check_invariants() const {
    if (at("") != Rational(1)) throw std::logic_error("CylinderTable: empty word mass != 1");
    for (const auto& [u, p] : prob) {
        if (p < Rational(0) || p > Rational(1))
            throw std::logic_error("CylinderTable: probability out of [0,1] at '" + u + "'");
        if (!alphabet.valid_word(u)) throw std::logic_error("CylinderTable: foreign word");
    }
    // both marginal consistencies, exact
    std::vector<std::string> words{""};
    for (int n = 0; n < depth; ++n) {
        std::vector<std::string> next;
        for (const auto& u : words) {
            Rational right(0), left(0);
            for (char a : alphabet.symbols) {
                right += at(u + a);
                left += at(a + u);
                next.push_back(u + a);
            }
            if (right != at(u))
                throw std::logic_error("CylinderTable: right marginal broken at '" + u + "'");
            if (left != at(u))
                throw std::logic_error("CylinderTable: left marginal broken at '" + u + "'");
        }
        words = std::move(next);
    }
}

const std::unordered_map<std::string, long long>& PeriodicOrbitMeasure::window_counts(int n) const {
    if (!cache_) cache_ = std::make_shared<std::map<int, std::unordered_map<std::string, long long>>>();
    auto it = cache_->find(n);
    if (it != cache_->end()) return it->second;
    std::unordered_map<std::string, long long> counts;
    long long L = (long long)word.size();
    std::string win;
    win.reserve(n);
    for (long long i = 0; i < L; ++i) {
        win.clear();
        for (int k = 0; k < n; ++k) win.push_back(word[(i + k) % L]);
        ++counts[win];
    }
    return (*cache_)[n] = std::move(counts);
}

Rational PeriodicOrbitMeasure::cylinder(const std::string& u) const {
    if (word.empty()) throw std::logic_error("PeriodicOrbitMeasure: empty word");
    if (u.empty()) return Rational(1);
    const auto& counts = window_counts((int)u.size());
    auto it = counts.find(u);
    long long c = it == counts.end() ? 0 : it->second;
    return Rational(c, (long long)word.size());
}

void BernoulliSpec::validate() const {
    if ((int)weights.size() != alphabet.size())
        throw std::invalid_argument("BernoulliSpec: weight count mismatch");
    Rational s(0);
    for (const auto& w : weights) {
        if (w < Rational(0)) throw std::invalid_argument("BernoulliSpec: negative weight");
        s += w;
    }
    if (s != Rational(1)) throw std::invalid_argument("BernoulliSpec: weights must sum to 1");
}

bool BernoulliSpec::full_support() const {
    return std::all_of(weights.begin(), weights.end(),
                       [](const Rational& w) { return w > Rational(0); });
}

void MarkovSpec::validate() const {
    int k = alphabet.size();
    if ((int)transition.size() != k || (int)stationary.size() != k)
        throw std::invalid_argument("MarkovSpec: dimension mismatch");
    for (const auto& row : transition) {
        if ((int)row.size() != k) throw std::invalid_argument("MarkovSpec: ragged matrix");
        Rational s(0);
        for (const auto& p : row) {
            if (p < Rational(0)) throw std::invalid_argument("MarkovSpec: negative entry");
            s += p;
        }
        if (s != Rational(1)) throw std::invalid_argument("MarkovSpec: row not stochastic");
    }
    Rational tot(0);
    for (const auto& p : stationary) tot += p;
    if (tot != Rational(1)) throw std::invalid_argument("MarkovSpec: pi not a distribution");
    for (int j = 0; j < k; ++j) {
        Rational s(0);
        for (int i = 0; i < k; ++i) s += stationary[i] * transition[i][j];
        if (s != stationary[j]) throw std::invalid_argument("MarkovSpec: pi not stationary");
    }
}

bool MarkovSpec::full_support() const {
    for (const auto& row : transition)
        for (const auto& p : row)
            if (p.is_zero()) return false;
    for (const auto& p : stationary)
        if (p.is_zero()) return false;
    return true;
}

const Alphabet& source_alphabet(const MeasureSource& src) {
    return std::visit([](const auto& s) -> const Alphabet& { return s.alphabet; }, src);
}

std::optional<int> source_depth(const MeasureSource& src) {
    if (auto* t = std::get_if<CylinderTable>(&src)) return t->depth;
    return std::nullopt;
}

Rational cylinder_prob(const MeasureSource& src, const std::string& u) {
    const Alphabet& alpha = source_alphabet(src);
    if (!alpha.valid_word(u)) throw std::invalid_argument("cylinder_prob: alphabet mismatch");
    if (u.empty()) return Rational(1);
    if (auto* b = std::get_if<BernoulliSpec>(&src)) {
        Rational p(1);
        for (char c : u) p *= b->weights[alpha.index_of(c)];
        return p;
    }
    if (auto* m = std::get_if<MarkovSpec>(&src)) {
        Rational p = m->stationary[alpha.index_of(u[0])];
        for (size_t i = 0; i + 1 < u.size(); ++i)
            p *= m->transition[alpha.index_of(u[i])][alpha.index_of(u[i + 1])];
        return p;
    }
    if (auto* pm = std::get_if<PeriodicOrbitMeasure>(&src)) return pm->cylinder(u);
    return std::get<CylinderTable>(src).at(u);
}

namespace {

void require_depth(const MeasureSource& s, int N) {
    auto d = source_depth(s);
    if (d && *d < N) throw std::out_of_range("distance_truncated: table depth exceeded");
}

// max over all words of length n of |mu[u] - nu[u]|; enumerates A^n
Rational level_max(const MeasureSource& mu, const MeasureSource& nu, int n,
                   const Alphabet& alpha) {
    Rational best(0);
    std::string u(n, alpha.symbols[0]);
    std::vector<int> idx(n, 0);
    while (true) {
        Rational d = (cylinder_prob(mu, u) - cylinder_prob(nu, u)).abs();
        if (d > best) best = d;
        int i = n - 1;
        while (i >= 0 && idx[i] == alpha.size() - 1) {
            idx[i] = 0;
            u[i] = alpha.symbols[0];
            --i;
        }
        if (i < 0) break;
        ++idx[i];
        u[i] = alpha.symbols[idx[i]];
    }
    return best;
}

// for two periodic sources only the windows on either support matter
Rational level_max_periodic(const PeriodicOrbitMeasure& a, const PeriodicOrbitMeasure& b, int n) {
    Rational best(0);
    const auto& ca = a.window_counts(n);
    const auto& cb = b.window_counts(n);
    long long la = (long long)a.word.size(), lb = (long long)b.word.size();
    for (const auto& [w, c] : ca) {
        auto it = cb.find(w);
        Rational d = (Rational(c, la) - Rational(it == cb.end() ? 0 : it->second, lb)).abs();
        if (d > best) best = d;
    }
    for (const auto& [w, c] : cb) {
        if (ca.count(w)) continue;
        Rational d = Rational(c, lb);
        if (d > best) best = d;
    }
    return best;
}

}  // namespace

DistanceInterval distance_truncated(const MeasureSource& mu, const MeasureSource& nu, int N) {
    const Alphabet& alpha = source_alphabet(mu);
    if (alpha.symbols != source_alphabet(nu).symbols)
        throw std::invalid_argument("distance_truncated: alphabet mismatch");
    require_depth(mu, N);
    require_depth(nu, N);
    auto* pa = std::get_if<PeriodicOrbitMeasure>(&mu);
    auto* pb = std::get_if<PeriodicOrbitMeasure>(&nu);
    Rational lower(0);
    for (int n = 1; n <= N; ++n) {
        Rational m;
        if (pa && pb) {
            m = level_max_periodic(*pa, *pb, n);
        } else {
            double full = std::pow((double)alpha.size(), n);
            if (full > (1 << 22))
                throw std::out_of_range("distance_truncated: enumeration budget exceeded");
            m = level_max(mu, nu, n, alpha);
        }
        lower += Rational::dyadic(1, n) * m;
    }
    return {lower, lower + Rational::dyadic(1, N)};
}

CylinderTable table_of(const MeasureSource& src, int depth) {
    const Alphabet& alpha = source_alphabet(src);
    require_depth(src, depth);
    CylinderTable t;
    t.alphabet = alpha;
    t.depth = depth;
    std::vector<std::string> words{""};
    t.prob[""] = Rational(1);
    for (int n = 0; n < depth; ++n) {
        std::vector<std::string> next;
        for (const auto& u : words)
            for (char a : alpha.symbols) {
                std::string v = u + a;
                Rational p = cylinder_prob(src, v);
                if (!p.is_zero()) t.prob[v] = p;
                next.push_back(std::move(v));
            }
        words = std::move(next);
    }
    return t;
}

CylinderTable mix_tables(const std::vector<std::pair<Rational, CylinderTable>>& parts) {
    if (parts.empty()) throw std::invalid_argument("mix_tables: empty mixture");
    CylinderTable out;
    out.alphabet = parts[0].second.alphabet;
    out.depth = parts[0].second.depth;
    for (const auto& [w, t] : parts) {
        if (t.depth != out.depth || t.alphabet.symbols != out.alphabet.symbols)
            throw std::invalid_argument("mix_tables: incompatible tables");
        for (const auto& [u, p] : t.prob) out.prob[u] += w * p;
    }
    return out;
}

Rational dist_to_segment(const MeasureSource& mu, const PeriodicOrbitMeasure& a,
                         const PeriodicOrbitMeasure& b, int N, int grid_log2) {
    CylinderTable ta = table_of(MeasureSource(a), N);
    CylinderTable tb = table_of(MeasureSource(b), N);
    long long steps = 1LL << grid_log2;
    std::optional<Rational> best;
    for (long long i = 0; i <= steps; ++i) {
        Rational t(i, steps);
        CylinderTable mixed = mix_tables({{t, ta}, {Rational(1) - t, tb}});
        auto d = distance_truncated(mu, MeasureSource(mixed), N);
        if (!best || d.upper < *best) best = d.upper;
    }
    return *best;
}

Rational psi_mixing_coeff(const MeasureSource& spec, int n) {
    if (n < 1) throw std::invalid_argument("psi_mixing_coeff: gap must be >= 1");
    if (auto* b = std::get_if<BernoulliSpec>(&spec)) {
        if (!b->full_support()) throw std::invalid_argument("psi_mixing_coeff: needs full support");
        return Rational(0);
    }
    auto* m = std::get_if<MarkovSpec>(&spec);
    if (!m) throw std::invalid_argument("psi_mixing_coeff: Bernoulli or Markov only");
    if (!m->full_support()) throw std::invalid_argument("psi_mixing_coeff: needs full support");
    int k = m->alphabet.size();
    // P^n
    std::vector<std::vector<Rational>> pw = m->transition;
    for (int s = 1; s < n; ++s) {
        std::vector<std::vector<Rational>> nx(k, std::vector<Rational>(k, Rational(0)));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                for (int l = 0; l < k; ++l) nx[i][j] += pw[i][l] * m->transition[l][j];
        pw = std::move(nx);
    }
    Rational best(0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            Rational d = (pw[i][j] / m->stationary[j] - Rational(1)).abs();
            if (d > best) best = d;
        }
    return best;
}

namespace {

int draw_index(const std::vector<Rational>& weights, Rng& rng) {
    // exact inverse-cdf draw: compare r/2^64 against cumulative weights
    uint64_t r = rng.next();
    Rational cum(0);
    for (size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        // r < cum * 2^64  <=>  r * den < num << 64 (128-bit exact)
        __int128 lhs = (__int128)r * cum.den();
        __int128 rhs = (__int128)cum.num() << 64;
        if (lhs < rhs) return (int)i;
    }
    return (int)weights.size() - 1;
}

}  // namespace

std::string sample_ring(const MeasureSource& src, int L, uint64_t seed) {
    if (L < 1) throw std::invalid_argument("sample_ring: L >= 1");
    Rng rng(seed);
    const Alphabet& alpha = source_alphabet(src);
    std::string out;
    out.reserve(L);
    if (auto* b = std::get_if<BernoulliSpec>(&src)) {
        for (int i = 0; i < L; ++i) out.push_back(alpha.symbols[draw_index(b->weights, rng)]);
        return out;
    }
    if (auto* m = std::get_if<MarkovSpec>(&src)) {
        // stationary path glued into a ring; wrap-around dependency ignored
        int s = draw_index(m->stationary, rng);
        out.push_back(alpha.symbols[s]);
        for (int i = 1; i < L; ++i) {
            s = draw_index(m->transition[s], rng);
            out.push_back(alpha.symbols[s]);
        }
        return out;
    }
    throw std::invalid_argument("sample_ring: Bernoulli or Markov only");
}

CylinderTable empirical_measure(const std::vector<std::string>& rings, int depth,
                                const Alphabet& alphabet) {
    if (rings.empty()) throw std::invalid_argument("empirical_measure: no rings");
    for (const auto& r : rings)
        if ((int)r.size() < depth)
            throw std::invalid_argument("empirical_measure: ring shorter than depth");
    CylinderTable t;
    t.alphabet = alphabet;
    t.depth = depth;
    t.prob[""] = Rational(1);
    Rational per_ring(1, (long long)rings.size());
    for (const auto& r : rings) {
        long long L = (long long)r.size();
        for (int n = 1; n <= depth; ++n) {
            std::unordered_map<std::string, long long> counts;
            std::string win;
            for (long long i = 0; i < L; ++i) {
                win.clear();
                for (int k = 0; k < n; ++k) win.push_back(r[(i + k) % L]);
                ++counts[win];
            }
            for (const auto& [w, c] : counts) t.prob[w] += per_ring * Rational(c, L);
        }
    }
    return t;
}

}  // namespace calim

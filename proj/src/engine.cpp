#include "calim/engine.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace calim {

RuleTable RuleTable::dense(int alphabet_size, int radius, std::vector<cell_t> table) {
    RuleTable r;
    r.alphabet_size_ = alphabet_size;
    r.radius_ = radius;
    r.window_ = 2 * radius + 1;
    size_t want = 1;
    for (int i = 0; i < r.window_; ++i) want *= alphabet_size;
    if (table.size() != want) throw std::invalid_argument("RuleTable: wrong table size");
    r.table_ = std::move(table);
    return r;
}

RuleTable RuleTable::callback(int alphabet_size, int radius,
                              std::function<cell_t(const cell_t*)> f) {
    RuleTable r;
    r.alphabet_size_ = alphabet_size;
    r.radius_ = radius;
    r.window_ = 2 * radius + 1;
    r.f_ = std::move(f);
    return r;
}

RuleTable RuleTable::elementary(int wolfram) {
    if (wolfram < 0 || wolfram > 255) throw std::invalid_argument("elementary: rule in [0,255]");
    std::vector<cell_t> t(8);
    for (int w = 0; w < 8; ++w) {
        // packed index: left cell most significant
        int bit = ((w >> 2) & 1) * 4 + ((w >> 1) & 1) * 2 + (w & 1);
        t[w] = (wolfram >> bit) & 1;
    }
    return dense(2, 1, std::move(t));
}

RuleTable RuleTable::identity(int alphabet_size) {
    return callback(alphabet_size, 0, [](const cell_t* w) { return w[0]; });
}

RingConfig ring_from_string(const std::string& s, const Alphabet& alpha) {
    RingConfig cfg;
    cfg.cells.reserve(s.size());
    for (char c : s) cfg.cells.push_back((cell_t)alpha.index_of(c));
    return cfg;
}

std::string ring_to_string(const RingConfig& cfg, const Alphabet& alpha) {
    std::string s;
    s.reserve(cfg.cells.size());
    for (cell_t c : cfg.cells) s.push_back(alpha.symbols[(size_t)c]);
    return s;
}

RingConfig step(const RuleTable& rule, const RingConfig& cfg) {
    int L = cfg.size();
    int w = rule.window();
    if (L < w) throw std::invalid_argument("step: ring shorter than rule window");
    RingConfig out;
    out.cells.resize(L);
    out.t = cfg.t + 1;
    int r = rule.radius();
    std::vector<cell_t> win(w);
    for (int i = 0; i < L; ++i) {
        for (int k = 0; k < w; ++k) win[k] = cfg.cells[(i - r + k + L) % L];
        out.cells[i] = rule.apply(win.data());
    }
    return out;
}

RingConfig iterate(const RuleTable& rule, RingConfig cfg, long long T, bool trace,
                   SpaceTimeTrace* out_trace, long long cell_cap) {
    if (trace && out_trace) {
        out_trace->width = cfg.size();
        out_trace->stride = 1;
        long long cells = (T + 1) * (long long)cfg.size();
        while (cells / out_trace->stride > cell_cap) out_trace->stride *= 2;
        out_trace->rows.clear();
    }
    for (long long s = 0; s <= T; ++s) {
        if (trace && out_trace && s % out_trace->stride == 0) out_trace->rows.push_back(cfg.cells);
        if (s == T) break;
        cfg = step(rule, cfg);
    }
    return cfg;
}

PredecessorSet predecessors(const RuleTable& rule, const std::string& u, int t,
                            const Alphabet& alpha, long long budget) {
    int r = rule.radius();
    int L = (int)u.size() + 2 * r * t;
    double total = std::pow((double)alpha.size(), L);
    if (total > (double)budget) throw std::length_error("predecessors: enumeration budget exceeded");
    PredecessorSet out;
    out.target = u;
    out.steps = t;
    std::vector<cell_t> word(L, 0);
    std::vector<cell_t> target;
    for (char c : u) target.push_back((cell_t)alpha.index_of(c));
    auto check = [&]() {
        std::vector<cell_t> cur = word;
        for (int s = 0; s < t; ++s) {
            std::vector<cell_t> nx(cur.size() - 2 * r);
            for (size_t i = 0; i + 2 * r < cur.size(); ++i) nx[i] = rule.apply(&cur[i]);
            cur = std::move(nx);
        }
        return cur == target;
    };
    while (true) {
        if (check()) {
            std::string w;
            for (cell_t c : word) w.push_back(alpha.symbols[(size_t)c]);
            out.members.push_back(std::move(w));
        }
        int i = L - 1;
        while (i >= 0 && word[i] == (cell_t)(alpha.size() - 1)) word[i--] = 0;
        if (i < 0) break;
        ++word[i];
    }
    return out;
}

Rational exact_pushforward(const RuleTable& rule, const MeasureSource& src,
                           const std::string& u, int t, long long budget) {
    const Alphabet& alpha = source_alphabet(src);
    int need = (int)u.size() + 2 * rule.radius() * t;
    if (auto d = source_depth(src); d && *d < need)
        throw std::out_of_range("exact_pushforward: source depth unavailable");
    PredecessorSet pre = predecessors(rule, u, t, alpha, budget);
    Rational p(0);
    for (const auto& v : pre.members) p += cylinder_prob(src, v);
    return p;
}

std::string trace_to_pgm(const SpaceTimeTrace& trace, int alphabet_size) {
    std::string out = "P5\n" + std::to_string(trace.width) + " " +
                      std::to_string(trace.rows.size()) + "\n255\n";
    for (const auto& row : trace.rows)
        for (cell_t c : row)
            out.push_back((char)(alphabet_size <= 1 ? 0 : 255 - (255 * (long long)c) /
                                                               (alphabet_size - 1)));
    return out;
}

std::string trace_to_ppm(const SpaceTimeTrace& trace,
                         const std::function<std::array<uint8_t, 3>(cell_t)>& palette) {
    std::string out = "P6\n" + std::to_string(trace.width) + " " +
                      std::to_string(trace.rows.size()) + "\n255\n";
    for (const auto& row : trace.rows)
        for (cell_t c : row) {
            auto rgb = palette(c);
            out.push_back((char)rgb[0]);
            out.push_back((char)rgb[1]);
            out.push_back((char)rgb[2]);
        }
    return out;
}

}  // namespace calim

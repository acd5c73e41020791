#include "calim/harness.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace calim {

std::vector<long long> ObservationPlan::times(const Schedule& s) const {
    if (!explicit_times.empty()) {
        auto t = explicit_times;
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        return t;
    }
    std::vector<long long> t{0};
    for (long long n = 1; n <= n_max; ++n) {
        t.push_back(s.T(n));
        t.push_back(s.T(n) + s.K(n));
        t.push_back(s.T(n + 1) - 1);
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

std::string project_output(const ConstructionAutomaton& a, const RingConfig& ring) {
    const Alphabet& B = a.output_alphabet();
    std::string s;
    s.reserve(ring.size());
    for (cell_t code : ring.cells) {
        Cell c = unpack_cell(code);
        s.push_back(c.kind == KIND_CELL && c.out != OUT_NONE ? B.symbols[c.out]
                                                             : B.symbols[0]);
    }
    return s;
}

namespace {

struct Accum {
    // cyclic window counts per observation index, per word
    std::vector<std::map<std::string, long long>> counts;
    std::vector<double> aux;  // summed density
    std::vector<std::vector<long long>> seg_lengths;
    std::vector<long long> swept, seg_total;
    std::vector<long long> tail_cells, total_cells;

    explicit Accum(size_t n)
        : counts(n), aux(n, 0.0), seg_lengths(n), swept(n, 0), seg_total(n, 0),
          tail_cells(n, 0), total_cells(n, 0) {}

    void merge(const Accum& o) {
        for (size_t i = 0; i < counts.size(); ++i) {
            for (const auto& [w, c] : o.counts[i]) counts[i][w] += c;
            aux[i] += o.aux[i];
            seg_lengths[i].insert(seg_lengths[i].end(), o.seg_lengths[i].begin(),
                                  o.seg_lengths[i].end());
            swept[i] += o.swept[i];
            seg_total[i] += o.seg_total[i];
            tail_cells[i] += o.tail_cells[i];
            total_cells[i] += o.total_cells[i];
        }
    }
};

void run_rings(const ConstructionAutomaton& a, const ExperimentConfig& cfg, int from, int to,
               const std::vector<long long>& obs, Accum& acc) {
    Rng base(cfg.seed);
    for (int s = from; s < to; ++s) {
        uint64_t ring_seed = base.fork((uint64_t)s).next();
        RingConfig ring = a.sample_initial(cfg.L, cfg.initial, ring_seed);
        size_t oi = 0;
        for (long long t = 0; oi < obs.size(); ++t) {
            if (t == obs[oi]) {
                std::string proj = project_output(a, ring);
                long long L = (long long)proj.size();
                for (int n = 1; n <= cfg.depth; ++n) {
                    std::string win;
                    for (long long i = 0; i < L; ++i) {
                        win.clear();
                        for (int k = 0; k < n; ++k) win.push_back(proj[(i + k) % L]);
                        ++acc.counts[oi][win];
                    }
                }
                SegmentReport rep = a.segment_scan(ring);
                acc.aux[oi] += rep.aux_density;
                long long n_t = a.schedule().phase_of(t);
                long long Kn = n_t >= 1 ? a.schedule().K(n_t) : 0;
                for (const auto& seg : rep.segments) {
                    acc.seg_lengths[oi].push_back(seg.length);
                    acc.seg_total[oi] += 1;
                    if (seg.swept) acc.swept[oi] += 1;
                    if (n_t >= 1 && seg.length > Kn) acc.tail_cells[oi] += seg.length;
                }
                acc.total_cells[oi] += L;
                ++oi;
                if (oi == obs.size()) break;
            }
            a.advance(ring);
        }
    }
}

DistanceInterval dist_to_reference(const CylinderTable& table, const WordSequenceProgram& ref,
                                   long long phase, int depth, int grid) {
    long long lo = std::max<long long>(1, phase - 1);
    long long hi = std::max<long long>(lo + 1, phase + 1);
    std::vector<CylinderTable> pts = limit_set_points(ref, lo, hi, grid, depth);
    DistanceInterval best{Rational(1), Rational(1)};
    bool first = true;
    for (const auto& p : pts) {
        DistanceInterval d =
            distance_truncated(MeasureSource(table), MeasureSource(p), depth);
        if (first || d.lower < best.lower) best.lower = d.lower;
        if (first || d.upper < best.upper) best.upper = d.upper;
        first = false;
    }
    return best;
}

}  // namespace

std::vector<TimeSeriesRow> run_experiment(const ConstructionAutomaton& a,
                                          const ExperimentConfig& cfg) {
    std::vector<long long> obs = cfg.observe.times(a.schedule());
    if (obs.empty()) return {};
    long long horizon = obs.back();
    if ((long long)cfg.L * cfg.S * std::max<long long>(horizon, 1) > cfg.budget_cells) {
        std::ostringstream msg;
        msg << "experiment budget refused: L*S*T = " << cfg.L << "*" << cfg.S << "*" << horizon
            << " exceeds " << cfg.budget_cells << "; reduce S to "
            << std::max<long long>(1, cfg.budget_cells / ((long long)cfg.L * horizon))
            << " or lower n_max";
        throw std::length_error(msg.str());
    }

    int jobs = std::max(1, cfg.jobs);
    std::vector<Accum> parts;
    parts.reserve(jobs);
    for (int j = 0; j < jobs; ++j) parts.emplace_back(obs.size());
    if (jobs == 1) {
        run_rings(a, cfg, 0, cfg.S, obs, parts[0]);
    } else {
        std::vector<std::thread> pool;
        int per = (cfg.S + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            int from = j * per, to = std::min(cfg.S, (j + 1) * per);
            if (from >= to) break;
            pool.emplace_back([&, j, from, to] { run_rings(a, cfg, from, to, obs, parts[j]); });
        }
        for (auto& th : pool) th.join();
    }
    Accum acc(obs.size());
    for (const auto& p : parts) acc.merge(p);

    const Alphabet& B = a.output_alphabet();
    std::vector<TimeSeriesRow> rows;
    long long denom = (long long)cfg.L * cfg.S;
    for (size_t oi = 0; oi < obs.size(); ++oi) {
        TimeSeriesRow row;
        row.t = obs[oi];
        row.table.alphabet = B;
        row.table.depth = cfg.depth;
        row.table.prob[""] = Rational(1);
        for (const auto& [w, c] : acc.counts[oi]) row.table.prob[w] = Rational(c, denom);
        row.aux_density = acc.aux[oi] / cfg.S;
        auto lens = acc.seg_lengths[oi];
        if (!lens.empty()) {
            std::sort(lens.begin(), lens.end());
            row.segments.min_len = lens.front();
            row.segments.max_len = lens.back();
            row.segments.median_len = lens[lens.size() / 2];
            row.segments.swept_fraction = (double)acc.swept[oi] / (double)acc.seg_total[oi];
        }
        row.segments.tail_fraction =
            acc.total_cells[oi] ? (double)acc.tail_cells[oi] / (double)acc.total_cells[oi] : 0.0;
        if (cfg.reference) {
            DistanceInterval d = dist_to_reference(row.table, *cfg.reference,
                                                   a.schedule().phase_of(row.t), cfg.depth,
                                                   cfg.segment_grid);
            row.dist_lower = d.lower;
            row.dist_upper = d.upper;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void cesaro_track(const ConstructionAutomaton& a, const ExperimentConfig& cfg,
                  std::vector<TimeSeriesRow>& rows) {
    if (rows.empty()) return;
    CylinderTable mean;
    mean.alphabet = rows[0].table.alphabet;
    mean.depth = rows[0].table.depth;
    std::map<std::string, Rational> sum;
    long long count = 0;
    for (auto& row : rows) {
        if (row.table.depth != mean.depth) throw std::invalid_argument("cesaro: depth mismatch");
        for (const auto& [w, p] : row.table.prob) sum[w] += p;
        ++count;
        mean.prob.clear();
        for (const auto& [w, p] : sum) mean.prob[w] = p / Rational(count);
        if (cfg.reference) {
            DistanceInterval d = dist_to_reference(mean, *cfg.reference,
                                                   a.schedule().phase_of(row.t), cfg.depth,
                                                   cfg.segment_grid);
            row.cesaro_lower = d.lower;
            row.cesaro_upper = d.upper;
        }
    }
}

namespace {

std::vector<std::string> depth_words(const Alphabet& alpha, int depth) {
    std::vector<std::string> all, cur{""};
    for (int n = 1; n <= depth; ++n) {
        std::vector<std::string> next;
        for (const auto& u : cur)
            for (char a : alpha.symbols) next.push_back(u + a);
        for (const auto& w : next) all.push_back(w);
        cur = std::move(next);
    }
    return all;
}

std::string dec6(const Rational& r) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << r.to_double();
    return os.str();
}

}  // namespace

std::string rows_to_csv(const std::vector<TimeSeriesRow>& rows, int depth,
                        const Alphabet& alphabet) {
    std::ostringstream os;
    std::vector<std::string> words = depth_words(alphabet, depth);
    os << "t,dist_lower,dist_lower_dec,dist_upper,dist_upper_dec,aux_density,"
          "cesaro_lower,cesaro_lower_dec,cesaro_upper,cesaro_upper_dec,"
          "seg_min,seg_median,seg_max,swept_fraction,tail_fraction";
    for (const auto& w : words) os << ",p[" << w << "],p_dec[" << w << "]";
    os << "\n";
    os.setf(std::ios::fixed);
    os.precision(6);
    for (const auto& r : rows) {
        os << r.t << "," << r.dist_lower.str() << "," << dec6(r.dist_lower) << ","
           << r.dist_upper.str() << "," << dec6(r.dist_upper) << "," << r.aux_density << ","
           << r.cesaro_lower.str() << "," << dec6(r.cesaro_lower) << ","
           << r.cesaro_upper.str() << "," << dec6(r.cesaro_upper) << "," << r.segments.min_len
           << "," << r.segments.median_len << "," << r.segments.max_len << ","
           << r.segments.swept_fraction << "," << r.segments.tail_fraction;
        for (const auto& w : words) {
            auto it = r.table.prob.find(w);
            Rational p = it == r.table.prob.end() ? Rational(0) : it->second;
            os << "," << p.str() << "," << dec6(p);
        }
        os << "\n";
    }
    return os.str();
}

void emit_csv(const std::vector<TimeSeriesRow>& rows, int depth, const Alphabet& alphabet,
              const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << rows_to_csv(rows, depth, alphabet);
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::string render_spacetime(const ConstructionAutomaton& a, const InitialWeights& w, int L,
                             long long T, uint64_t seed, long long cell_cap) {
    RingConfig ring = a.sample_initial(L, w, seed);
    SpaceTimeTrace trace;
    trace.width = L;
    trace.stride = 1;
    while ((T + 1) * (long long)L / trace.stride > cell_cap) trace.stride *= 2;
    for (long long t = 0; t <= T; ++t) {
        if (t % trace.stride == 0) trace.rows.push_back(ring.cells);
        if (t == T) break;
        a.advance(ring);
    }
    return trace_to_ppm(trace, a.palette());
}

}  // namespace calim

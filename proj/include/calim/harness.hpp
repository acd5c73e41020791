#pragma once

#include <string>
#include <vector>

#include "calim/approx.hpp"
#include "calim/construction.hpp"

namespace calim {

struct ObservationPlan {
    // explicit times, or phase endpoints T(n), T(n)+K(n), T(n+1)-1 up to n_max
    std::vector<long long> explicit_times;
    long long n_max = 0;  // used when explicit_times is empty

    std::vector<long long> times(const Schedule& s) const;
};

struct ExperimentConfig {
    InitialWeights initial;
    int L = 1024;
    int S = 100;
    int depth = 4;
    ObservationPlan observe;
    ProgramPtr reference;      // polygonal-path reference for distance columns
    uint64_t seed = 0;
    int jobs = 1;
    int segment_grid = 4;      // subdivisions when sampling reference segments
    long long budget_cells = 1LL << 33;
};

struct SegmentStats {
    long long min_len = 0;
    long long median_len = 0;
    long long max_len = 0;
    double swept_fraction = 0.0;
    double tail_fraction = 0.0;  // cells in segments longer than K(n(t))
};

struct TimeSeriesRow {
    long long t = 0;
    CylinderTable table;           // B-projected empirical measure
    Rational dist_lower;           // interval distance to the reference window
    Rational dist_upper;
    double aux_density = 0.0;
    Rational cesaro_lower;         // filled by cesaro_track
    Rational cesaro_upper;
    SegmentStats segments;
};

// Maps layered cells to the output alphabet; blank output reads as the first
// letter of B.
std::string project_output(const ConstructionAutomaton& a, const RingConfig& ring);

std::vector<TimeSeriesRow> run_experiment(const ConstructionAutomaton& a,
                                          const ExperimentConfig& cfg);

// augments rows with running Cesaro-mean distances to the reference
void cesaro_track(const ConstructionAutomaton& a, const ExperimentConfig& cfg,
                  std::vector<TimeSeriesRow>& rows);

std::string rows_to_csv(const std::vector<TimeSeriesRow>& rows, int depth,
                        const Alphabet& alphabet);
void emit_csv(const std::vector<TimeSeriesRow>& rows, int depth, const Alphabet& alphabet,
              const std::string& path);

// space-time diagram of a single seeded ring as a P6 image
std::string render_spacetime(const ConstructionAutomaton& a, const InitialWeights& w, int L,
                             long long T, uint64_t seed, long long cell_cap = 16'000'000);

}  // namespace calim

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kelp {

struct SimConfig {
    std::uint64_t k = 10;     // values per dynamic field
    std::uint64_t m = 1;      // dynamic field count
    std::uint64_t tau = 3;    // branching threshold
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;

    void validate_nested() const;   // k >= 1 (degenerate k=1 allowed here only)
    void validate_parallel() const; // k >= 2, tau <= k
};

// Which stopping process the parallel simulation runs.
//   NoveltyRate   : each column surfaces a new distinct value with constant
//                   probability 1/k per line; a column is identified after
//                   tau novelties. Matches the per-column expectation tau*k
//                   that the harmonic-number bound is built on.
//   DistinctValues: each line draws uniform over k per column; stop when
//                   every column has shown >= tau distinct values. The exact
//                   coupon process, reported to expose the approximation gap.
enum class ParallelProcess { NoveltyRate, DistinctValues };

// Mean lines until tau lines have landed in one fixed depth-m leaf, each
// line reaching it with probability k^-m.
double simulate_nested(const SimConfig& cfg);

// Mean lines until all m columns are identified.
double simulate_parallel(const SimConfig& cfg,
                         ParallelProcess process = ParallelProcess::NoveltyRate);

struct TheoryValues {
    double nested = 0.0;              // tau * k^m
    double parallel = 0.0;            // tau * k * H_m
    double exact_single_column = 0.0; // k * sum_{i=0}^{tau-1} 1/(k-i)
};

TheoryValues theoretical(const SimConfig& cfg);

double harmonic(std::uint64_t m);

struct SweepRow {
    std::uint64_t k = 0, m = 0, tau = 0;
    std::string model; // "nested" | "parallel"
    double mc_mean = 0.0;
    double theory = 0.0;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

} // namespace kelp

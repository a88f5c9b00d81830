#include "kelp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kelp/error.hpp"
#include "kelp/rng.hpp"

namespace kelp {

void SimConfig::validate_nested() const {
    if (k < 1) throw ConfigError("simulate: k must be >= 1");
    if (m < 1) throw ConfigError("simulate: m must be >= 1");
    if (tau < 1) throw ConfigError("simulate: tau must be >= 1");
    if (trials < 1) throw ConfigError("simulate: trials must be >= 1");
}

void SimConfig::validate_parallel() const {
    validate_nested();
    if (k < 2) throw ConfigError("simulate parallel: k must be >= 2");
    if (tau > k) throw ConfigError("simulate parallel: tau must be <= k");
}

double harmonic(std::uint64_t m) {
    double h = 0.0;
    for (std::uint64_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

double simulate_nested(const SimConfig& cfg) {
    cfg.validate_nested();
    const double p = std::pow(1.0 / static_cast<double>(cfg.k), static_cast<double>(cfg.m));
    std::uint64_t total = 0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::derive(cfg.seed, t);
        std::uint64_t hits = 0, lines = 0;
        while (hits < cfg.tau) {
            ++lines;
            if (p >= 1.0 || rng.bernoulli(p)) ++hits;
        }
        total += lines;
    }
    return static_cast<double>(total) / static_cast<double>(cfg.trials);
}

double simulate_parallel(const SimConfig& cfg, ParallelProcess process) {
    cfg.validate_parallel();
    const double p = 1.0 / static_cast<double>(cfg.k);
    std::uint64_t total = 0;
    std::vector<std::uint64_t> counts(cfg.m);
    std::vector<std::vector<char>> seen;
    if (process == ParallelProcess::DistinctValues)
        seen.assign(cfg.m, std::vector<char>(cfg.k, 0));

    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        Rng rng = Rng::derive(cfg.seed ^ 0x706172616c6cULL, t);
        std::fill(counts.begin(), counts.end(), 0);
        if (process == ParallelProcess::DistinctValues)
            for (auto& s : seen) std::fill(s.begin(), s.end(), 0);

        std::uint64_t pending = cfg.m, lines = 0;
        while (pending > 0) {
            ++lines;
            for (std::uint64_t i = 0; i < cfg.m; ++i) {
                if (counts[i] >= cfg.tau) continue;
                bool novel;
                if (process == ParallelProcess::NoveltyRate) {
                    novel = rng.bernoulli(p);
                } else {
                    std::uint64_t v = rng.below(cfg.k);
                    novel = !seen[i][v];
                    seen[i][v] = 1;
                }
                if (novel && ++counts[i] == cfg.tau) --pending;
            }
        }
        total += lines;
    }
    return static_cast<double>(total) / static_cast<double>(cfg.trials);
}

TheoryValues theoretical(const SimConfig& cfg) {
    cfg.validate_nested();
    TheoryValues v;
    v.nested = static_cast<double>(cfg.tau) *
               std::pow(static_cast<double>(cfg.k), static_cast<double>(cfg.m));
    v.parallel = static_cast<double>(cfg.tau) * static_cast<double>(cfg.k) * harmonic(cfg.m);
    if (cfg.tau <= cfg.k) {
        double sum = 0.0;
        for (std::uint64_t i = 0; i < cfg.tau; ++i)
            sum += 1.0 / static_cast<double>(cfg.k - i);
        v.exact_single_column = static_cast<double>(cfg.k) * sum;
    } else {
        v.exact_single_column = std::numeric_limits<double>::infinity();
    }
    return v;
}

std::string sweep_csv_header() { return "k,m,tau,model,mc_mean,theory"; }

std::string sweep_csv_row(const SweepRow& row) {
    std::ostringstream os;
    os << row.k << ',' << row.m << ',' << row.tau << ',' << row.model << ',' << row.mc_mean
       << ',' << row.theory;
    return os.str();
}

} // namespace kelp

#include "kelp/rng.hpp"

#include <algorithm>
#include <cmath>

#include "kelp/error.hpp"

namespace kelp {

ZipfSampler::ZipfSampler(std::size_t n, double s) {
    if (n == 0) throw ConfigError("zipf sampler needs at least one rank");
    cdf_.resize(n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        acc += std::pow(static_cast<double>(r + 1), -s);
        cdf_[r] = acc;
    }
    for (auto& v : cdf_) v /= acc;
    cdf_.back() = 1.0;
}

std::size_t ZipfSampler::sample(Rng& rng) const {
    double u = rng.real();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
}

double ZipfSampler::weight(std::size_t idx) const {
    if (idx >= cdf_.size()) return 0.0;
    double prev = idx == 0 ? 0.0 : cdf_[idx - 1];
    return cdf_[idx] - prev;
}

} // namespace kelp

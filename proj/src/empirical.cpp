#include "prophet/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "prophet/errors.hpp"

namespace prophet {

EmpiricalCdf build_empirical(std::span<const double> samples) {
    return build_empirical(std::vector<double>(samples.begin(), samples.end()));
}

EmpiricalCdf build_empirical(std::vector<double>&& samples) {
    if (samples.empty()) throw DomainError("build_empirical: empty sample set");
    std::sort(samples.begin(), samples.end());
    return EmpiricalCdf(std::move(samples));
}

double EmpiricalCdf::operator()(double x) const noexcept {
    const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
    return static_cast<double>(k) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("empirical_quantile: q must lie in (0, 1]");
    const double m = static_cast<double>(sorted_.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * m));
    rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
    return sorted_[rank - 1];
}

double dkw_epsilon(std::size_t m, double alpha) {
    if (m < 1) throw DomainError("dkw_epsilon: m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("dkw_epsilon: alpha must lie in (0, 1)");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(m)));
}

double sup_distance(const EmpiricalCdf& ecdf, const Distribution& spec) {
    const auto& xs = ecdf.sorted();
    const double m = static_cast<double>(xs.size());
    double sup = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        // Between consecutive sample points both functions are monotone, so
        // the supremum is reached at a sample point or at its left limit.
        const double right = std::abs(static_cast<double>(j) / m - cdf(spec, xs[i]));
        const double left = std::abs(static_cast<double>(i) / m - cdf_left(spec, xs[i]));
        sup = std::max({sup, right, left});
        i = j;
    }
    return sup;
}

} // namespace prophet

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "prophet/distributions.hpp"

namespace prophet {

/// Empirical distribution function of a sample set.
class EmpiricalCdf {
public:
    const std::vector<double>& sorted() const noexcept { return sorted_; }
    std::size_t size() const noexcept { return sorted_.size(); }

    /// Fraction of samples <= x.
    double operator()(double x) const noexcept;

    /// The ceil(q*m)-th smallest sample. Requires 0 < q <= 1.
    double quantile(double q) const;

private:
    friend EmpiricalCdf build_empirical(std::span<const double> samples);
    friend EmpiricalCdf build_empirical(std::vector<double>&& samples);
    explicit EmpiricalCdf(std::vector<double> sorted) : sorted_(std::move(sorted)) {}

    std::vector<double> sorted_;
};

/// Throws DomainError on empty input.
EmpiricalCdf build_empirical(std::span<const double> samples);
EmpiricalCdf build_empirical(std::vector<double>&& samples);

inline double empirical_quantile(const EmpiricalCdf& ecdf, double q) { return ecdf.quantile(q); }

/// DKW band half-width: sqrt(ln(2/alpha) / (2m)).
double dkw_epsilon(std::size_t m, double alpha);

/// Exact two-sided Kolmogorov-Smirnov distance sup_x |F_m(x) - F(x)|.
/// Handles atoms in F by comparing left limits at every sample point.
double sup_distance(const EmpiricalCdf& ecdf, const Distribution& spec);

} // namespace prophet

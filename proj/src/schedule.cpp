#include "prophet/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "prophet/errors.hpp"

namespace prophet {

double hill_kertz_rhs(double y, double beta) {
    const double ylny = y > kYFloor ? y * std::log(y) : 0.0;
    return ylny - y - (beta - 1.0);
}

double YCurve::at(double t) const {
    const auto last = y.size() - 1;
    const double pos = std::clamp(t, 0.0, 1.0) * static_cast<double>(last);
    const auto j = std::min(static_cast<std::size_t>(pos), last);
    if (j == last) return y[last];
    const double frac = pos - static_cast<double>(j);
    return y[j] + frac * (y[j + 1] - y[j]);
}

YCurve solve_hill_kertz(double beta, double step) {
    if (!(step > 0.0 && step <= 1e-3)) throw DomainError("solve_hill_kertz: step must lie in (0, 1e-3]");
    if (!(beta > 1.0 && beta < 2.0)) throw DomainError("solve_hill_kertz: beta must lie in (1, 2)");

    const auto steps = static_cast<std::size_t>(std::llround(1.0 / step));
    YCurve curve{beta, 1.0 / static_cast<double>(steps), {}};
    const double h = curve.h;
    curve.y.resize(steps + 1);
    curve.y[0] = 1.0;

    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    double y = 1.0;
    for (std::size_t j = 1; j <= steps; ++j) {
        const double k1 = hill_kertz_rhs(y, beta);
        const double k2 = hill_kertz_rhs(clamp01(y + 0.5 * h * k1), beta);
        const double k3 = hill_kertz_rhs(clamp01(y + 0.5 * h * k2), beta);
        const double k4 = hill_kertz_rhs(clamp01(y + h * k3), beta);
        y = clamp01(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        curve.y[j] = y;
    }
    return curve;
}

double calibrate_beta(double tol, double step) {
    if (!(tol >= 1e-10)) throw DomainError("calibrate_beta: tol must be >= 1e-10");
    double lo = 1.30;
    double hi = 1.40;
    // y(1) is positive below the root and pinned at 0 above it.
    if (!(solve_hill_kertz(lo, step).terminal() > 0.0) || solve_hill_kertz(hi, step).terminal() != 0.0)
        throw ComputationError("calibrate_beta: [1.30, 1.40] does not bracket the terminal condition y(1) = 0");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (solve_hill_kertz(mid, step).terminal() > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double beta = 0.5 * (lo + hi);
    if (beta < 1.34 || beta > 1.35) {
        std::ostringstream msg;
        msg << "calibrate_beta: converged to " << beta << ", outside [1.34, 1.35]";
        throw ComputationError(msg.str());
    }
    return beta;
}

QuantileSchedule quantile_schedule(int n, const YCurve& curve) {
    if (n < 2) throw DomainError("quantile_schedule: n must be >= 2");
    if (curve.y.size() < 2 || curve.y.front() != 1.0)
        throw DomainError("quantile_schedule: curve must start at y(0) = 1");

    constexpr double kRepair = 1e-12;
    QuantileSchedule s{n, std::vector<double>(static_cast<std::size_t>(n) + 1)};
    const double exponent = 1.0 / (n - 1.0);
    s.eps[0] = 0.0;
    for (int i = 1; i < n; ++i) {
        const double yi = curve.at(static_cast<double>(i) / n);
        // 1 - y^(1/(n-1)) without cancellation for y near 1.
        double e = yi > 0.0 ? -std::expm1(std::log(yi) * exponent) : 1.0;
        const double prev = s.eps[static_cast<std::size_t>(i) - 1];
        if (!(e > prev)) e = prev + kRepair;
        s.eps[static_cast<std::size_t>(i)] = e;
    }
    if (!(s.eps[static_cast<std::size_t>(n) - 1] < 1.0))
        throw DomainError("quantile_schedule: curve reaches 0 before t = (n-1)/n");
    s.eps[static_cast<std::size_t>(n)] = 1.0;
    return s;
}

} // namespace prophet

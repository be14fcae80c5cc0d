#pragma once

// Quality of an approximate solution set Omega against an exact Pareto set
// Psi: distance to the Pareto set (DPS), correctness, number of correct
// solutions, and mean / 95% confidence-interval aggregation.

#include "cost_vector.hpp"
#include "pareto.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace mosp {

inline constexpr double kMembershipTolerance = kDefaultCostTolerance;

/// f_j = max over both collections of attribute j; 0 is replaced by 1.
template <std::size_t J>
BasicCostVector<J> normalization_factors(std::span<const BasicCostVector<J>> pareto,
                                         std::span<const BasicCostVector<J>> solutions) {
    if (pareto.empty() || solutions.empty()) throw std::invalid_argument("normalization needs two non-empty sets");
    BasicCostVector<J> f{};
    for (auto set : {pareto, solutions})
        for (const auto& c : set)
            for (std::size_t j = 0; j < J; ++j) f[j] = std::max(f[j], c[j]);
    for (double& v : f)
        if (v == 0.0) v = 1.0;
    return f;
}

/// Smallest Euclidean distance between a normalised solution and a
/// normalised Pareto point.
template <std::size_t J>
double dps(std::span<const BasicCostVector<J>> pareto, std::span<const BasicCostVector<J>> solutions) {
    const auto f = normalization_factors<J>(pareto, solutions);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& omega : solutions) {
        for (const auto& psi : pareto) {
            double sum = 0.0;
            for (std::size_t j = 0; j < J; ++j) {
                const double d = omega[j] / f[j] - psi[j] / f[j];
                sum += d * d;
            }
            best = std::min(best, std::sqrt(sum));
        }
    }
    return best;
}

/// Solutions (with multiplicity) whose cost is a member of the Pareto set.
template <std::size_t J>
std::size_t num_correct(const BasicParetoSet<J>& pareto, std::span<const BasicCostVector<J>> solutions,
                        double tol = kMembershipTolerance) {
    std::size_t n = 0;
    for (const auto& s : solutions)
        if (pareto.contains_cost(s, tol)) ++n;
    return n;
}

/// 1 if at least one solution is a Pareto-set member, else 0.
template <std::size_t J>
int correctness(const BasicParetoSet<J>& pareto, std::span<const BasicCostVector<J>> solutions,
                double tol = kMembershipTolerance) {
    return num_correct(pareto, solutions, tol) > 0 ? 1 : 0;
}

struct AggregateStat {
    double mean = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t n = 0;
};

/// Two-sided 95% Student-t quantile with `dof` degrees of freedom.
inline double t_quantile_975(std::size_t dof) {
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

/// Mean and 95% CI half-width (Student-t, sample standard deviation).
/// A single sample has half-width 0.
inline AggregateStat aggregate(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("cannot aggregate an empty sample");
    AggregateStat s;
    s.n = samples.size();
    double sum = 0.0;
    for (double x : samples) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - s.mean) * (x - s.mean);
        const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
        s.ci_halfwidth = t_quantile_975(s.n - 1) * sd / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

/// One instance's metrics at one episode.
struct MetricSample {
    std::size_t instance = 0;
    std::size_t run = 0;
    std::size_t episode = 0;
    /// NaN while no slot holds a completed route.
    double dps = std::numeric_limits<double>::quiet_NaN();
    int correctness = 0;
    std::size_t num_correct = 0;
};

/// Metrics for every episode of one learning trace. DPS only uses filled
/// slots; with none filled it is NaN and the counts are zero.
template <std::size_t J>
std::vector<MetricSample> evaluate_trace(const BasicParetoSet<J>& pareto,
                                         std::span<const std::array<BasicCostVector<J>, J>> trace,
                                         std::size_t instance, std::size_t run,
                                         double tol = kMembershipTolerance) {
    const auto psi = pareto.costs();
    std::vector<MetricSample> out;
    out.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        MetricSample m;
        m.instance = instance;
        m.run = run;
        m.episode = i + 1;
        std::vector<BasicCostVector<J>> omega;
        for (const auto& c : trace[i])
            if (c.is_finite()) omega.push_back(c);
        if (!omega.empty() && !psi.empty()) {
            m.dps = dps<J>(psi, omega);
            m.num_correct = num_correct<J>(pareto, omega, tol);
            m.correctness = m.num_correct > 0 ? 1 : 0;
        }
        out.push_back(m);
    }
    return out;
}

}  // namespace mosp

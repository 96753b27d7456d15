#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ding {

enum class ScheduleKind {
    LinearFlow,  ///< alpha = 1 - t, sigma = t
    TrigVp,      ///< alpha = cos(pi t / 2), sigma = sin(pi t / 2)
};

struct ScheduleCoefficients {
    double alpha;
    double sigma;
};

/// Interpolation schedule X_t = alpha_t X_0 + sigma_t X_1 on t in [0, 1].
/// Both kinds hit the boundary values (1, 0) at t = 0 and (0, 1) at t = 1
/// exactly.
class Schedule {
public:
    constexpr Schedule() = default;
    constexpr explicit Schedule(ScheduleKind kind) : kind_(kind) {}

    ScheduleKind kind() const { return kind_; }

    /// Throws ErrorKind::Domain for t outside [0, 1].
    ScheduleCoefficients at(double t) const;

    static Schedule parse(std::string_view name);

    friend bool operator==(const Schedule&, const Schedule&) = default;

private:
    ScheduleKind kind_ = ScheduleKind::LinearFlow;
};

std::string_view to_string(ScheduleKind kind);

inline ScheduleCoefficients eval_schedule(const Schedule& schedule, double t) {
    return schedule.at(t);
}

enum class Spacing { Uniform, Quadratic };

std::string_view to_string(Spacing spacing);
Spacing parse_spacing(std::string_view name);

/// Strictly increasing knots 0 = t_0 < ... < t_K = 1. Samplers walk it
/// backwards, taking (s, t) = (t_{k-1}, t_k).
class TimeGrid {
public:
    /// Validates monotonicity and the exact endpoints.
    explicit TimeGrid(std::vector<double> knots);

    std::size_t steps() const { return knots_.size() - 1; }
    double operator[](std::size_t k) const { return knots_[k]; }
    std::span<const double> knots() const { return knots_; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> knots_;
};

/// uniform: t_k = k / K; quadratic: t_k = (k / K)^2. K = 0 is rejected.
TimeGrid make_grid(std::size_t steps, Spacing spacing = Spacing::Uniform);

}  // namespace ding

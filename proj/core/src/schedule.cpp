#include "ding/schedule.hpp"

#include <cmath>
#include <numbers>

#include "ding/error.hpp"

namespace ding {

ScheduleCoefficients Schedule::at(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) {
        fail(ErrorKind::Domain, "schedule time must lie in [0, 1], got " + std::to_string(t));
    }
    // Pin the endpoints: cos(pi/2) is not exactly zero in floating point.
    if (t == 0.0) {
        return {1.0, 0.0};
    }
    if (t == 1.0) {
        return {0.0, 1.0};
    }
    switch (kind_) {
        case ScheduleKind::LinearFlow:
            return {1.0 - t, t};
        case ScheduleKind::TrigVp: {
            const double angle = 0.5 * std::numbers::pi * t;
            return {std::cos(angle), std::sin(angle)};
        }
    }
    fail(ErrorKind::InvalidParameter, "unknown schedule kind");
}

Schedule Schedule::parse(std::string_view name) {
    if (name == "linear-flow") {
        return Schedule(ScheduleKind::LinearFlow);
    }
    if (name == "trig-vp") {
        return Schedule(ScheduleKind::TrigVp);
    }
    fail(ErrorKind::InvalidParameter, "unknown schedule '" + std::string(name) + "'");
}

std::string_view to_string(ScheduleKind kind) {
    return kind == ScheduleKind::LinearFlow ? "linear-flow" : "trig-vp";
}

std::string_view to_string(Spacing spacing) {
    return spacing == Spacing::Uniform ? "uniform" : "quadratic";
}

Spacing parse_spacing(std::string_view name) {
    if (name == "uniform") {
        return Spacing::Uniform;
    }
    if (name == "quadratic") {
        return Spacing::Quadratic;
    }
    fail(ErrorKind::InvalidParameter, "unknown grid spacing '" + std::string(name) + "'");
}

TimeGrid::TimeGrid(std::vector<double> knots) : knots_(std::move(knots)) {
    require(knots_.size() >= 2, ErrorKind::InvalidParameter, "time grid needs at least one step");
    require(knots_.front() == 0.0 && knots_.back() == 1.0, ErrorKind::InvalidParameter,
            "time grid must start at 0 and end at 1");
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        require(knots_[k] > knots_[k - 1], ErrorKind::InvalidParameter,
                "time grid must be strictly increasing");
    }
}

TimeGrid make_grid(std::size_t steps, Spacing spacing) {
    require(steps >= 1, ErrorKind::InvalidParameter, "grid step count K must be >= 1");
    std::vector<double> knots(steps + 1);
    const double K = static_cast<double>(steps);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double u = static_cast<double>(k) / K;
        knots[k] = spacing == Spacing::Uniform ? u : u * u;
    }
    knots.back() = 1.0;
    return TimeGrid(std::move(knots));
}

}  // namespace ding

// grid.hpp: uniform time grid t_n = n*dt, n = 0..steps

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "qbm/errors.hpp"

namespace qbm {

struct TimeGrid {
    double dt{2.0 * std::numbers::pi / 200.0};
    std::size_t steps{0};

    static TimeGrid covering(double dt, double t_end) {
        if (!(dt > 0.0) || !(t_end >= 0.0)) {
            throw DomainError("time grid needs dt > 0 and t_end >= 0");
        }
        return TimeGrid{dt, static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9))};
    }

    std::size_t size() const noexcept { return steps + 1; }
    double t(std::size_t n) const noexcept { return static_cast<double>(n) * dt; }
    double end() const noexcept { return t(steps); }
    bool operator==(const TimeGrid&) const = default;
};

}  // namespace qbm

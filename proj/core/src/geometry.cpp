#include "arisim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace arisim {

double horizontal_distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

Position apply_move(const Position& pos, double direction, double speed,
                    const MobilityLimits& lim) {
    const double v = std::clamp(speed, 0.0, lim.v_max);
    const double step = v * lim.tau;
    Position out = pos;
    out.x = std::clamp(pos.x + step * std::cos(direction), 0.0, lim.area_side);
    out.y = std::clamp(pos.y + step * std::sin(direction), 0.0, lim.area_side);
    return out;
}

SafetyReport check_safety(std::span<const Position> positions, const MobilityLimits& lim) {
    SafetyReport report;
    const int n = static_cast<int>(positions.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (horizontal_distance(positions[i], positions[j]) < lim.d_min) {
                report.violations.emplace_back(i, j);
            }
        }
    }
    report.ok = report.violations.empty();
    return report;
}

} // namespace arisim

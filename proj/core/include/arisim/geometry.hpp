#pragma once

#include <span>
#include <utility>
#include <vector>

namespace arisim {

// Platform or user location. Flying platforms share a fixed altitude z.
struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct MobilityLimits {
    double v_max = 50.0;        // maximum speed, m/s
    double d_min = 5.0;         // pairwise safety distance, m
    double tau = 1.0;           // slot duration, s
    double area_side = 1000.0;  // square service area side, m
};

double horizontal_distance(const Position& a, const Position& b);
double distance(const Position& a, const Position& b);

// One kinematic step. Speed is clipped to [0, v_max], the new position is
// clipped to the service area, altitude is unchanged. Never rejects.
Position apply_move(const Position& pos, double direction, double speed,
                    const MobilityLimits& lim);

struct SafetyReport {
    bool ok = true;
    std::vector<std::pair<int, int>> violations;  // index pairs closer than d_min
};

// Pairwise horizontal separation check; distance exactly d_min is safe.
SafetyReport check_safety(std::span<const Position> positions, const MobilityLimits& lim);

} // namespace arisim

#include "hri/visit_task.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hri/errors.hpp"

namespace hri {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void VisitTask::validate() const {
    if (targets.empty()) throw ConfigError("at least one target is required", "targets");
    if (size() > kMaxTargets) throw ConfigError("at most 9 targets can be enumerated", "targets");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ConfigError("weight must be finite and >= 0", "weight");
}

void VisitTask::check_order(std::span<const int> order) const {
    if (static_cast<int>(order.size()) != size()) throw ArgumentError("visit order must cover every target");
    std::vector<bool> seen(targets.size(), false);
    for (int i : order) {
        if (i < 0 || i >= size() || seen[static_cast<std::size_t>(i)]) {
            throw ArgumentError("visit order is not a permutation");
        }
        seen[static_cast<std::size_t>(i)] = true;
    }
}

double VisitTask::path_length(std::span<const int> order) const {
    double len = 0.0;
    Point2 p = start;
    for (int i : order) {
        if (i < 0 || i >= size()) throw ArgumentError("target index out of range: " + std::to_string(i));
        len += distance(p, targets[static_cast<std::size_t>(i)]);
        p = targets[static_cast<std::size_t>(i)];
    }
    return len;
}

std::vector<VisitOrder> all_orders(const VisitTask& task) {
    task.validate();
    VisitOrder order(static_cast<std::size_t>(task.size()));
    std::iota(order.begin(), order.end(), 0);
    std::vector<VisitOrder> out;
    do {
        out.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

}  // namespace hri

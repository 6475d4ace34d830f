#include "hri/collab.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <vector>

namespace hri {

namespace {

constexpr double kEps = 1e-9;
constexpr int kNever = std::numeric_limits<int>::max() / 4;

bool better(const CollabValue& a, const CollabValue& b) {
    if (a.primary > b.primary + kEps) return true;
    if (a.primary < b.primary - kEps) return false;
    return a.secondary > b.secondary + kEps;
}

bool matches(const CollabValue& a, const CollabValue& b) {
    return std::abs(a.primary - b.primary) <= kEps && std::abs(a.secondary - b.secondary) <= kEps;
}

}  // namespace

CollabSolver::CollabSolver(const GridworldCollect& dyn, Eigen::VectorXd weights) : dyn_(dyn) {
    if (weights.size() != 2) throw ConfigError("gridworld reward needs 2 weights", "weights");
    time_penalty_ = weights[0];
    bonus_ = weights[1];
    if (time_penalty_ > 0.0 || bonus_ < 0.0) {
        throw ConfigError("exact collaborative planning needs time_penalty <= 0 and collect_bonus >= 0", "weights");
    }
    if (static_cast<int>(dyn_.targets().size()) > kMaxTargets) {
        throw ConfigError("instance exceeds the exhaustive joint-planning limit of 6 targets", "grid/targets");
    }
    if (dyn_.width() > 255 || dyn_.height() > 255 || dyn_.horizon().steps > 255) {
        throw ConfigError("instance exceeds the joint planner's 255-cell/255-step limits", "grid");
    }
}

CollabValue CollabSolver::solve(Cell r, Cell h, std::uint32_t todo, int remaining, int human_first) const {
    if (todo == 0 || remaining <= 0) return {0.0, 0.0};
    const std::uint64_t key = (static_cast<std::uint64_t>(r.x) & 0xff) | (static_cast<std::uint64_t>(r.y) & 0xff) << 8 |
                              (static_cast<std::uint64_t>(h.x) & 0xff) << 16 |
                              (static_cast<std::uint64_t>(h.y) & 0xff) << 24 | static_cast<std::uint64_t>(todo) << 32 |
                              static_cast<std::uint64_t>(remaining & 0xff) << 48 |
                              static_cast<std::uint64_t>(human_first + 1) << 56;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const auto& targets = dyn_.targets();
    std::vector<int> ids;
    for (int i = 0; i < static_cast<int>(targets.size()); ++i) {
        if (todo & (1u << i)) ids.push_back(i);
    }
    const int n = static_cast<int>(ids.size());

    // Arrival times along every ordering of every subset, per agent.
    auto times_for = [&](Cell from, const std::vector<int>& order, std::vector<int>& out) {
        int t = 0;
        Cell p = from;
        for (int id : order) {
            t += manhattan(p, targets[static_cast<std::size_t>(id)]);
            p = targets[static_cast<std::size_t>(id)];
            out[static_cast<std::size_t>(id)] = std::min(out[static_cast<std::size_t>(id)], t);
        }
    };

    CollabValue best{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    std::vector<int> time(targets.size());
    for (std::uint32_t sub = 0; sub < (1u << n); ++sub) {
        std::vector<int> robot_set, human_set;
        for (int k = 0; k < n; ++k) {
            if (sub & (1u << k)) {
                robot_set.push_back(ids[static_cast<std::size_t>(k)]);
            } else if (ids[static_cast<std::size_t>(k)] != human_first) {
                human_set.push_back(ids[static_cast<std::size_t>(k)]);
            }
        }
        std::vector<int> ro = robot_set;
        do {
            std::vector<int> ho = human_set;
            do {
                std::fill(time.begin(), time.end(), kNever);
                times_for(r, ro, time);
                std::vector<int> horder;
                if (human_first >= 0) horder.push_back(human_first);
                horder.insert(horder.end(), ho.begin(), ho.end());
                times_for(h, horder, time);
                int collected = 0, completion = 0;
                double secondary = 0.0;
                for (int id : ids) {
                    const int t = time[static_cast<std::size_t>(id)];
                    if (t <= remaining) {
                        ++collected;
                        completion = std::max(completion, t);
                    }
                    secondary -= std::min(t, remaining);
                }
                const int busy = collected == n ? completion : remaining;
                const CollabValue v{time_penalty_ * busy + bonus_ * collected, secondary};
                if (better(v, best)) best = v;
            } while (std::next_permutation(ho.begin(), ho.end()));
        } while (std::next_permutation(ro.begin(), ro.end()));
    }
    memo_.emplace(key, best);
    return best;
}

int CollabSolver::active_first(const GridState& x, std::optional<int> human_first) const {
    if (!human_first) return -1;
    const int g = *human_first;
    if (g < 0 || g >= static_cast<int>(dyn_.targets().size())) throw ArgumentError("human_first is not a target index");
    return x.human == dyn_.targets()[static_cast<std::size_t>(g)] ? -1 : g;
}

CollabValue CollabSolver::value(const GridState& x, int remaining, std::optional<int> human_first) const {
    const std::uint32_t todo = dyn_.full_mask() & ~x.collected;
    return solve(x.robot, x.human, todo, remaining, active_first(x, human_first));
}

JointAction CollabSolver::first_action(const GridState& x, int remaining, std::optional<int> human_first) const {
    const std::uint32_t todo = dyn_.full_mask() & ~x.collected;
    const int hf = active_first(x, human_first);
    if (todo == 0 || remaining <= 0) return {};
    const CollabValue target = solve(x.robot, x.human, todo, remaining, hf);
    const int w = dyn_.width(), hgt = dyn_.height();
    const int uncollected_now = std::popcount(todo);
    for (Move mr : kMoves) {
        for (Move mh : kMoves) {
            const Cell r2 = apply_move(x.robot, mr, w, hgt);
            const Cell h2 = apply_move(x.human, mh, w, hgt);
            if (hf >= 0) {
                const Cell g = dyn_.targets()[static_cast<std::size_t>(hf)];
                if (h2 == x.human && mh != Move::stay) continue;
                if (h2 != x.human && manhattan(h2, g) > manhattan(x.human, g)) continue;
            }
            std::uint32_t left = todo;
            for (std::size_t i = 0; i < dyn_.targets().size(); ++i) {
                if (dyn_.targets()[i] == r2 || dyn_.targets()[i] == h2) left &= ~(1u << i);
            }
            const int picked = std::popcount(todo & ~left);
            const int next_hf = (hf >= 0 && h2 != dyn_.targets()[static_cast<std::size_t>(hf)]) ? hf : -1;
            const CollabValue tail = solve(r2, h2, left, remaining - 1, next_hf);
            const CollabValue q{time_penalty_ + bonus_ * picked + tail.primary, -uncollected_now + tail.secondary};
            if (matches(q, target)) return {mr, mh};
        }
    }
    throw DomainError("joint planner found no action attaining the optimal value");
}

JointPlan CollabSolver::plan(const GridState& x0) const {
    const int T = dyn_.horizon().steps;
    JointPlan out;
    GridState x = x0;
    out.value = value(x0, T - x0.time_step).primary;
    for (int t = x0.time_step; t < T; ++t) {
        const JointAction a = first_action(x, T - t);
        out.robot.push_back(a.robot);
        out.human.push_back(a.human);
        x = dyn_.step(x, a.robot, a.human);
    }
    return out;
}

}  // namespace hri

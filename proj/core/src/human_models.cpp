#include "hri/human_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hri {

const char* to_string(HumanKind k) {
    switch (k) {
        case HumanKind::perfect_collaborator: return "perfect-collaborator";
        case HumanKind::myopic: return "myopic";
        case HumanKind::best_response: return "best-response";
        case HumanKind::boltzmann: return "boltzmann";
        case HumanKind::scripted: return "scripted";
    }
    return "?";
}

HumanKind parse_human_kind(std::string_view name) {
    for (HumanKind k : {HumanKind::perfect_collaborator, HumanKind::myopic, HumanKind::best_response,
                        HumanKind::boltzmann, HumanKind::scripted}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown human model kind '" + std::string(name) + "'", "human/kind");
}

void HumanModel::validate(Eigen::Index feature_dim) const {
    if (kind == HumanKind::boltzmann && !(beta > 0.0)) throw ConfigError("beta must be > 0", "human/beta");
    const bool needs_theta = kind == HumanKind::best_response || kind == HumanKind::boltzmann;
    if (needs_theta && theta_h.size() != feature_dim) {
        throw ConfigError("theta_h dimension " + std::to_string(theta_h.size()) + " does not match feature dimension " +
                              std::to_string(feature_dim),
                          "human/theta");
    }
}

std::vector<double> boltzmann_log_probabilities(std::span<const double> rewards, double beta) {
    if (rewards.empty()) throw ArgumentError("candidate set is empty");
    if (!(beta >= 0.0)) throw ArgumentError("beta must be >= 0");
    std::vector<double> s(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) s[i] = beta * rewards[i];
    const double z = logsumexp(s);
    for (double& v : s) v -= z;
    return s;
}

double boltzmann_log_likelihood(std::span<const double> rewards, std::size_t index, double beta) {
    if (index >= rewards.size()) throw ArgumentError("candidate index out of range");
    return boltzmann_log_probabilities(rewards, beta)[index];
}

std::size_t boltzmann_sample(std::span<const double> rewards, double beta, Rng& rng) {
    const auto lp = boltzmann_log_probabilities(rewards, beta);
    return rng.categorical_log(lp);
}

// ---- PiecewiseControls ----------------------------------------------------

PiecewiseControls::PiecewiseControls(const ControlBounds& bounds, int steps, int pieces)
    : bounds_(bounds), steps_(steps), pieces_(pieces) {
    if (steps < 1) throw ConfigError("horizon must be >= 1", "horizon");
    if (pieces < 1 || pieces > steps) throw ConfigError("pieces must be in [1, horizon]", "optimizer/pieces");
}

namespace {

struct Axis {
    double center;
    double half;
};

Axis steer_axis(const ControlBounds& b) { return {0.0, b.steer_max}; }
Axis accel_axis(const ControlBounds& b) { return {(b.accel_min + b.accel_max) / 2.0, (b.accel_max - b.accel_min) / 2.0}; }

double to_z(double u, Axis a) {
    const double s = std::clamp((u - a.center) / a.half, -1.0 + 1e-9, 1.0 - 1e-9);
    return std::atanh(s);
}

}  // namespace

ControlSequence<CarControl> PiecewiseControls::decode(const Eigen::VectorXd& z) const {
    const Axis sa = steer_axis(bounds_), aa = accel_axis(bounds_);
    ControlSequence<CarControl> u(static_cast<std::size_t>(steps_));
    for (int t = 0; t < steps_; ++t) {
        const Eigen::Index p = piece_of(t);
        u[static_cast<std::size_t>(t)] = {sa.center + sa.half * std::tanh(z[2 * p]),
                                          aa.center + aa.half * std::tanh(z[2 * p + 1])};
    }
    return u;
}

Eigen::VectorXd PiecewiseControls::pull_back(const Eigen::VectorXd& z, const Eigen::VectorXd& grad_u) const {
    const Axis sa = steer_axis(bounds_), aa = accel_axis(bounds_);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
    for (int t = 0; t < steps_; ++t) {
        const Eigen::Index p = piece_of(t);
        g[2 * p] += grad_u[2 * t];
        g[2 * p + 1] += grad_u[2 * t + 1];
    }
    for (Eigen::Index p = 0; p < pieces_; ++p) {
        const double ts = std::tanh(z[2 * p]), ta = std::tanh(z[2 * p + 1]);
        g[2 * p] *= sa.half * (1.0 - ts * ts);
        g[2 * p + 1] *= aa.half * (1.0 - ta * ta);
    }
    return g;
}

Eigen::VectorXd PiecewiseControls::encode(const ControlSequence<CarControl>& u) const {
    if (static_cast<int>(u.size()) != steps_) throw ArgumentError("control sequence length does not match horizon");
    const Axis sa = steer_axis(bounds_), aa = accel_axis(bounds_);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim());
    Eigen::VectorXi count = Eigen::VectorXi::Zero(pieces_);
    for (int t = 0; t < steps_; ++t) {
        const Eigen::Index p = piece_of(t);
        sum[2 * p] += u[static_cast<std::size_t>(t)].steer;
        sum[2 * p + 1] += u[static_cast<std::size_t>(t)].accel;
        ++count[p];
    }
    Eigen::VectorXd z(dim());
    for (Eigen::Index p = 0; p < pieces_; ++p) {
        z[2 * p] = to_z(sum[2 * p] / count[p], sa);
        z[2 * p + 1] = to_z(sum[2 * p + 1] / count[p], aa);
    }
    return z;
}

// ---- continuous best response ---------------------------------------------

BestResponse<CarControl> optimize_agent(const DrivingScene& dyn, const DriveState& x0,
                                        const ControlSequence<CarControl>& other, Agent who,
                                        const RewardModel<DrivingScene>& model, const ContinuousOptions& opts,
                                        const ControlSequence<CarControl>* warm_start) {
    const int T = static_cast<int>(other.size());
    if (T < 1) throw ArgumentError("control sequences must have length >= 1");
    if (opts.starts < 1) throw ConfigError("multi-start count must be >= 1", "optimizer/starts");
    for (const auto& u : other) dyn.check_control(u, who == Agent::robot ? Agent::human : Agent::robot);
    const PiecewiseControls pc(dyn.bounds(), T, std::min(opts.pieces, T));

    const Objective f = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
        const auto u = pc.decode(z);
        Eigen::VectorXd gu;
        double v;
        if (who == Agent::robot) {
            v = dyn.reward_and_gradients(x0, u, other, model.params, model.owner, model.weights, grad ? &gu : nullptr,
                                         nullptr);
        } else {
            v = dyn.reward_and_gradients(x0, other, u, model.params, model.owner, model.weights, nullptr,
                                         grad ? &gu : nullptr);
        }
        if (grad) *grad = pc.pull_back(z, gu);
        return v;
    };

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(pc.zero());
    if (warm_start && static_cast<int>(warm_start->size()) == T) starts.push_back(pc.encode(*warm_start));
    {
        ControlSequence<CarControl> brake(static_cast<std::size_t>(T), CarControl{0.0, dyn.bounds().accel_min * 0.5});
        ControlSequence<CarControl> throttle(static_cast<std::size_t>(T), CarControl{0.0, dyn.bounds().accel_max * 0.5});
        starts.push_back(pc.encode(brake));
        starts.push_back(pc.encode(throttle));
    }
    Rng rng(mix_seed(opts.seed, 0x5eed));
    while (static_cast<int>(starts.size()) < opts.starts) {
        Eigen::VectorXd z(pc.dim());
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
        starts.push_back(z);
    }
    starts.resize(static_cast<std::size_t>(opts.starts));

    BestResponse<CarControl> best;
    best.value = -std::numeric_limits<double>::infinity();
    for (const auto& z0 : starts) {
        const AscentResult r = maximize_bfgs(f, z0, opts.ascent);
        if (r.value > best.value) {
            best.value = r.value;
            best.controls = pc.decode(r.x);
            best.converged = r.converged;
        }
    }
    return best;
}

BestResponse<CarControl> trajectory_best_response(const DrivingScene& dyn, const DriveState& x0,
                                                  const ControlSequence<CarControl>& u_r,
                                                  const RewardModel<DrivingScene>& model_h,
                                                  const ContinuousOptions& opts,
                                                  const ControlSequence<CarControl>* warm_start) {
    return optimize_agent(dyn, x0, u_r, Agent::human, model_h, opts, warm_start);
}

// ---- GoalDirectedWalker ---------------------------------------------------

GoalDirectedWalker::GoalDirectedWalker(int width, int height, double beta)
    : width_(width), height_(height), beta_(beta) {
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0", "human/beta");
}

const std::vector<double>& GoalDirectedWalker::soft_values(Cell goal) const {
    if (auto it = cache_.find(goal); it != cache_.end()) return it->second;
    const auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y * width_ + c.x); };
    std::vector<double> v(static_cast<std::size_t>(width_ * height_));
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) v[idx({x, y})] = -manhattan({x, y}, goal);
    }
    std::vector<double> next(v.size());
    std::array<double, kMoves.size()> q{};
    for (int it = 0; it < 2000; ++it) {
        double change = 0.0;
        for (int y = 0; y < height_; ++y) {
            for (int x = 0; x < width_; ++x) {
                const Cell c{x, y};
                if (c == goal) {
                    next[idx(c)] = 0.0;
                    continue;
                }
                for (std::size_t m = 0; m < kMoves.size(); ++m) {
                    q[m] = beta_ * (-1.0 + v[idx(apply_move(c, kMoves[m], width_, height_))]);
                }
                next[idx(c)] = logsumexp(q) / beta_;
                change = std::max(change, std::abs(next[idx(c)] - v[idx(c)]));
            }
        }
        v.swap(next);
        if (change < 1e-13) break;
    }
    return cache_.emplace(goal, std::move(v)).first->second;
}

std::vector<double> GoalDirectedWalker::move_log_weights(Cell at, Cell goal) const {
    const auto& v = soft_values(goal);
    std::vector<double> w(kMoves.size());
    for (std::size_t m = 0; m < kMoves.size(); ++m) {
        const Cell n = apply_move(at, kMoves[m], width_, height_);
        w[m] = beta_ * (-1.0 + v[static_cast<std::size_t>(n.y * width_ + n.x)]);
    }
    return w;
}

Move GoalDirectedWalker::sample_move(Cell at, Cell goal, Rng& rng) const {
    return kMoves[rng.categorical_log(move_log_weights(at, goal))];
}

std::size_t GoalDirectedWalker::sample_goal(Cell at, std::span<const Cell> goals, Rng& rng) const {
    if (goals.empty()) throw DomainError("no goal to choose from");
    std::vector<double> w;
    for (Cell g : goals) w.push_back(-beta_ * manhattan(at, g));
    return rng.categorical_log(w);
}

}  // namespace hri

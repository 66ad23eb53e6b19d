#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "schelling/graph.hpp"

namespace schelling {

/// Minimum same-group share an agent needs to be happy, stored exactly in
/// hundredths so the happiness boundary never depends on float rounding.
class Tolerance {
public:
    constexpr Tolerance() = default;

    static constexpr Tolerance from_hundredths(int h) {
        if (h < 0 || h > 100) {
            throw std::invalid_argument("tolerance must lie in [0,1]");
        }
        Tolerance t;
        t.hundredths_ = h;
        return t;
    }

    /// Rounds to the nearest hundredth.
    static Tolerance from_double(double t) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw std::invalid_argument("tolerance must lie in [0,1], got " + std::to_string(t));
        }
        return from_hundredths(static_cast<int>(std::lround(t * 100.0)));
    }

    [[nodiscard]] constexpr int hundredths() const noexcept { return hundredths_; }
    [[nodiscard]] constexpr double value() const noexcept { return hundredths_ / 100.0; }

    friend constexpr auto operator<=>(Tolerance, Tolerance) = default;

private:
    int hundredths_ = 0;
};

/// same/total >= t, exactly. An agent with no neighbors is happy.
[[nodiscard]] constexpr bool is_happy(std::size_t same, std::size_t total, Tolerance t) noexcept {
    if (total == 0) {
        return true;
    }
    return same * 100 >= static_cast<std::size_t>(t.hundredths()) * total;
}

/// How the starting network is drawn from `initial_degree`.
enum class InitMode : std::uint8_t {
    /// Each agent initiates `initial_degree` connections (mean degree just
    /// under twice that). See init_initiated_graph.
    per_agent,
    /// Exactly n * initial_degree / 2 uniform edges, mean degree
    /// `initial_degree`. See init_random_graph.
    fixed_edges,
};

struct ModelParams {
    std::size_t n = 1000;
    std::size_t initial_degree = 80;
    std::size_t degree_floor = 40;
    Tolerance t1 = Tolerance::from_hundredths(50);
    Tolerance t2 = Tolerance::from_hundredths(50);
    double s = 0.5;
    std::size_t max_steps = 1000;
    InitMode init = InitMode::per_agent;

    [[nodiscard]] Tolerance tolerance(Group g) const noexcept { return g == Group::one ? t1 : t2; }

    void validate() const {
        if (n < 2) {
            throw std::invalid_argument("n must be at least 2");
        }
        if (initial_degree >= n) {
            throw std::invalid_argument("initial_degree must be below n");
        }
        if (degree_floor > initial_degree) {
            throw std::invalid_argument("degree_floor must not exceed initial_degree");
        }
        if (!(s > 0.0 && s <= 0.5)) {
            throw std::invalid_argument("s must lie in (0, 0.5]");
        }
        if (max_steps == 0) {
            throw std::invalid_argument("max_steps must be positive");
        }
    }
};

/// What one activation did to the graph.
struct ActivationReport {
    AgentId agent = 0;
    bool happy = true;
    std::optional<AgentId> broke_with;
    // Degree of `broke_with` right after the break.
    std::size_t partner_degree_after = 0;
    std::size_t adds = 0;
    std::size_t degree_before = 0;
    std::size_t degree_after = 0;
    bool saturated = false;
    // Unhappy but without any opposite-group neighbor to drop.
    bool stuck = false;
};

struct StepReport {
    std::size_t breaks = 0;
    std::size_t adds = 0;
    std::size_t unhappy_before = 0;
    std::size_t stuck = 0;
    std::size_t saturated = 0;
    bool all_happy_after = false;
};

/// Observer that ignores every activation.
struct NullObserver {
    void operator()(const ActivationReport&) const noexcept {}
};

/// One simulation: the mutable network, the fixed labels, and the run's
/// random source. Every agent is activated once per step in a fresh uniform
/// shuffle, each seeing the live graph left by earlier activations.
class Model {
public:
    Model(const ModelParams& params, std::uint64_t seed) : params_(params), rng_(seed) {
        params_.validate();
        net_ = params_.init == InitMode::per_agent ? init_initiated_graph(params_.n, params_.initial_degree, rng_)
                                                   : init_random_graph(params_.n, params_.initial_degree, rng_);
        groups_ = GroupAssignment(params_.n, params_.s);
        order_.resize(params_.n);
        std::iota(order_.begin(), order_.end(), AgentId{0});
    }

    /// Starts from a caller-built state. Used to set up small scenarios.
    Model(const ModelParams& params, Network net, GroupAssignment groups, std::uint64_t seed)
        : params_(params), rng_(seed), net_(std::move(net)), groups_(std::move(groups)) {
        if (net_.size() != groups_.size()) {
            throw std::invalid_argument("network and group assignment sizes differ");
        }
        params_.n = net_.size();
        order_.resize(params_.n);
        std::iota(order_.begin(), order_.end(), AgentId{0});
    }

    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] const Network& network() const noexcept { return net_; }
    [[nodiscard]] Network& network() noexcept { return net_; }
    [[nodiscard]] const GroupAssignment& groups() const noexcept { return groups_; }
    [[nodiscard]] std::size_t steps_taken() const noexcept { return steps_; }

    [[nodiscard]] bool agent_happy(AgentId a) const {
        const auto st = neighbor_stats(net_, groups_, a);
        return is_happy(st.same, st.total, params_.tolerance(groups_[a]));
    }

    [[nodiscard]] bool all_happy() const {
        for (AgentId a = 0; a < net_.size(); ++a) {
            if (!agent_happy(a)) {
                return false;
            }
        }
        return true;
    }

    /// Happy agents leave the graph alone. An unhappy agent drops one
    /// uniformly chosen opposite-group edge, then tops itself back up to
    /// the degree floor with uniformly random new contacts.
    ActivationReport activate(AgentId a) {
        ActivationReport rep;
        rep.agent = a;
        rep.degree_before = net_.degree(a);
        rep.happy = agent_happy(a);
        if (!rep.happy) {
            const Group own = groups_[a];
            opposite_.clear();
            for (AgentId b : net_.neighbors(a)) {
                if (groups_[b] != own) {
                    opposite_.push_back(b);
                }
            }
            if (opposite_.empty()) {
                rep.stuck = true;
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, opposite_.size() - 1);
                const AgentId b = opposite_[pick(rng_)];
                net_.remove_edge(a, b);
                rep.broke_with = b;
                rep.partner_degree_after = net_.degree(b);
            }
            while (net_.degree(a) < params_.degree_floor) {
                if (!add_random_nonneighbor(net_, a, rng_)) {
                    rep.saturated = true;
                    break;
                }
                ++rep.adds;
            }
        }
        rep.degree_after = net_.degree(a);
        return rep;
    }

    template <class Observer = NullObserver>
    StepReport step(Observer&& observe = Observer{}) {
        StepReport rep;
        std::shuffle(order_.begin(), order_.end(), rng_);
        for (AgentId a : order_) {
            const auto act = activate(a);
            rep.unhappy_before += act.happy ? 0 : 1;
            rep.breaks += act.broke_with ? 1 : 0;
            rep.adds += act.adds;
            rep.stuck += act.stuck ? 1 : 0;
            rep.saturated += act.saturated ? 1 : 0;
            observe(act);
        }
        ++steps_;
        rep.all_happy_after = all_happy();
        return rep;
    }

private:
    ModelParams params_;
    Rng rng_;
    Network net_;
    GroupAssignment groups_;
    std::vector<AgentId> order_;
    std::vector<AgentId> opposite_;
    std::size_t steps_ = 0;
};

}  // namespace schelling

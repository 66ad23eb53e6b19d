#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace schelling {

using AgentId = std::uint32_t;

/// Random source used everywhere in the library. A run owns exactly one.
using Rng = std::mt19937_64;

/// Undirected simple graph with O(1) edge lookup (bit matrix) and
/// per-agent neighbor lists for iteration.
///
/// Neighbor lists are kept in insertion order with swap-removal, so the
/// order depends only on the sequence of edits. Two networks built by the
/// same edit sequence iterate identically, which is what makes seeded runs
/// reproducible.
class Network {
public:
    Network() = default;

    explicit Network(std::size_t n)
        : n_(n), words_per_row_((n + 63) / 64), bits_(n * words_per_row_, 0), neighbors_(n) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_; }

    [[nodiscard]] std::size_t degree(AgentId a) const { return neighbors_[check(a)].size(); }

    [[nodiscard]] std::span<const AgentId> neighbors(AgentId a) const { return neighbors_[check(a)]; }

    [[nodiscard]] bool has_edge(AgentId a, AgentId b) const {
        check(a);
        check(b);
        return test_bit(a, b);
    }

    /// Inserts {a,b}. Self-loops and duplicates are contract violations.
    void add_edge(AgentId a, AgentId b) {
        check(a);
        check(b);
        if (a == b) {
            throw std::logic_error("add_edge: self-loop " + std::to_string(a));
        }
        if (test_bit(a, b)) {
            throw std::logic_error("add_edge: duplicate edge {" + std::to_string(a) + "," + std::to_string(b) + "}");
        }
        set_bit(a, b, true);
        set_bit(b, a, true);
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
        ++edges_;
    }

    /// Removes {a,b}. Removing an absent edge is a contract violation.
    void remove_edge(AgentId a, AgentId b) {
        check(a);
        check(b);
        if (a == b || !test_bit(a, b)) {
            throw std::logic_error("remove_edge: no edge {" + std::to_string(a) + "," + std::to_string(b) + "}");
        }
        set_bit(a, b, false);
        set_bit(b, a, false);
        erase_from(neighbors_[a], b);
        erase_from(neighbors_[b], a);
        --edges_;
    }

    /// All edges as ascending pairs (a < b), sorted.
    [[nodiscard]] std::vector<std::pair<AgentId, AgentId>> edge_list() const {
        std::vector<std::pair<AgentId, AgentId>> out;
        out.reserve(edges_);
        for (AgentId a = 0; a < n_; ++a) {
            for (AgentId b : neighbors_[a]) {
                if (a < b) {
                    out.emplace_back(a, b);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Debug export: one "a b" line per edge, ascending.
    void write_edge_list(std::ostream& os) const {
        for (auto [a, b] : edge_list()) {
            os << a << ' ' << b << '\n';
        }
    }

    /// Exhaustive consistency check of the bit matrix against the neighbor
    /// lists. Returns an empty string when every invariant holds.
    [[nodiscard]] std::string audit() const {
        std::size_t degree_sum = 0;
        std::size_t bit_count = 0;
        for (AgentId a = 0; a < n_; ++a) {
            if (test_bit(a, a)) {
                return "self-loop at " + std::to_string(a);
            }
            auto sorted = neighbors_[a];
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
                return "duplicate neighbor of " + std::to_string(a);
            }
            for (AgentId b : sorted) {
                if (b >= n_ || !test_bit(a, b) || !test_bit(b, a)) {
                    return "asymmetric edge {" + std::to_string(a) + "," + std::to_string(b) + "}";
                }
            }
            degree_sum += sorted.size();
            for (std::size_t w = 0; w < words_per_row_; ++w) {
                bit_count += static_cast<std::size_t>(std::popcount(bits_[a * words_per_row_ + w]));
            }
        }
        if (bit_count != degree_sum) {
            return "bit matrix disagrees with neighbor lists";
        }
        if (degree_sum != 2 * edges_) {
            return "edge count is not half the degree sum";
        }
        return {};
    }

    friend bool operator==(const Network& x, const Network& y) {
        return x.n_ == y.n_ && x.edges_ == y.edges_ && x.bits_ == y.bits_;
    }

private:
    AgentId check(AgentId a) const {
        if (a >= n_) {
            throw std::out_of_range("agent " + std::to_string(a) + " out of range");
        }
        return a;
    }

    [[nodiscard]] bool test_bit(AgentId a, AgentId b) const noexcept {
        return (bits_[a * words_per_row_ + b / 64] >> (b % 64)) & 1U;
    }

    void set_bit(AgentId a, AgentId b, bool on) noexcept {
        auto& word = bits_[a * words_per_row_ + b / 64];
        const std::uint64_t mask = std::uint64_t{1} << (b % 64);
        word = on ? (word | mask) : (word & ~mask);
    }

    static void erase_from(std::vector<AgentId>& list, AgentId b) {
        auto it = std::find(list.begin(), list.end(), b);
        *it = list.back();
        list.pop_back();
    }

    std::size_t n_ = 0;
    std::size_t words_per_row_ = 0;
    std::size_t edges_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::vector<AgentId>> neighbors_;
};

enum class Group : std::uint8_t { one = 1, two = 2 };

/// Fixed binary labelling. Agents [0, round(s*n)) form group one (the small
/// group); the rest form group two.
class GroupAssignment {
public:
    GroupAssignment() = default;

    GroupAssignment(std::size_t n, double small_fraction) : small_fraction_(small_fraction) {
        if (!(small_fraction >= 0.0 && small_fraction <= 1.0)) {
            throw std::invalid_argument("group size fraction must lie in [0,1]");
        }
        const auto small = static_cast<std::size_t>(std::llround(small_fraction * static_cast<double>(n)));
        labels_.assign(n, Group::two);
        std::fill_n(labels_.begin(), small, Group::one);
        size_one_ = small;
    }

    /// Arbitrary labelling, mostly for tests.
    explicit GroupAssignment(std::vector<Group> labels) : labels_(std::move(labels)) {
        size_one_ = static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Group::one));
        small_fraction_ = labels_.empty() ? 0.0 : static_cast<double>(size_one_) / static_cast<double>(labels_.size());
    }

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] Group operator[](AgentId a) const { return labels_.at(a); }
    [[nodiscard]] std::size_t count(Group g) const noexcept {
        return g == Group::one ? size_one_ : labels_.size() - size_one_;
    }
    [[nodiscard]] double small_fraction() const noexcept { return small_fraction_; }

private:
    std::vector<Group> labels_;
    std::size_t size_one_ = 0;
    double small_fraction_ = 0.0;
};

/// Uniform simple graph with exactly n*avg_degree/2 edges (G(n, M)).
inline Network init_random_graph(std::size_t n, std::size_t avg_degree, Rng& rng) {
    if (n < 2) {
        throw std::invalid_argument("init_random_graph: need at least 2 agents");
    }
    if ((n * avg_degree) % 2 != 0) {
        throw std::invalid_argument("init_random_graph: n * avg_degree must be even");
    }
    const std::size_t m = n * avg_degree / 2;
    if (avg_degree >= n || m > n * (n - 1) / 2) {
        throw std::invalid_argument("init_random_graph: more edges requested than pairs available");
    }
    Network net(n);
    std::uniform_int_distribution<AgentId> pick(0, static_cast<AgentId>(n - 1));
    while (net.edge_count() < m) {
        const AgentId a = pick(rng);
        const AgentId b = pick(rng);
        if (a != b && !net.has_edge(a, b)) {
            net.add_edge(a, b);
        }
    }
    return net;
}

/// Every agent, in index order, picks `per_agent` distinct partners
/// uniformly from the other agents. The edge set is the union of all picks,
/// so a pair chosen from both sides yields one edge and the mean degree is
/// a little under 2 * per_agent. Whether a pair is linked does not depend
/// on either agent's index, which keeps group labels unbiased.
inline Network init_initiated_graph(std::size_t n, std::size_t per_agent, Rng& rng) {
    if (n < 2) {
        throw std::invalid_argument("init_initiated_graph: need at least 2 agents");
    }
    if (per_agent >= n) {
        throw std::invalid_argument("init_initiated_graph: per-agent connections must be below n");
    }
    Network net(n);
    std::uniform_int_distribution<AgentId> pick(0, static_cast<AgentId>(n - 1));
    std::vector<AgentId> chosen_by(n, static_cast<AgentId>(n));
    for (AgentId a = 0; a < n; ++a) {
        for (std::size_t made = 0; made < per_agent;) {
            const AgentId b = pick(rng);
            if (b == a || chosen_by[b] == a) {
                continue;
            }
            chosen_by[b] = a;
            ++made;
            if (!net.has_edge(a, b)) {
                net.add_edge(a, b);
            }
        }
    }
    return net;
}

/// Connects `a` to an agent drawn uniformly from its non-neighbors.
/// Returns nullopt, leaving the graph untouched, when `a` is saturated.
inline std::optional<AgentId> add_random_nonneighbor(Network& net, AgentId a, Rng& rng) {
    const std::size_t n = net.size();
    if (net.degree(a) + 1 >= n) {
        return std::nullopt;
    }
    std::uniform_int_distribution<AgentId> pick(0, static_cast<AgentId>(n - 1));
    for (;;) {
        const AgentId b = pick(rng);
        if (b != a && !net.has_edge(a, b)) {
            net.add_edge(a, b);
            return b;
        }
    }
}

struct NeighborStats {
    std::size_t same = 0;
    std::size_t total = 0;
};

inline NeighborStats neighbor_stats(const Network& net, const GroupAssignment& groups, AgentId a) {
    const Group own = groups[a];
    NeighborStats st;
    for (AgentId b : net.neighbors(a)) {
        st.same += groups[b] == own ? 1 : 0;
    }
    st.total = net.degree(a);
    return st;
}

}  // namespace schelling

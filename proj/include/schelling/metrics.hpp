#pragma once

#include <cstddef>

#include "schelling/graph.hpp"
#include "schelling/model.hpp"

namespace schelling {

struct SimilarityReport {
    double overall = 1.0;
    double group1 = 1.0;
    double group2 = 1.0;
    std::size_t happy_count = 0;
    // Agents with no neighbors; their ratio is taken as 1.
    std::size_t isolated = 0;
};

/// Unweighted means of the per-agent same/total ratio, overall and per
/// group, plus the number of agents currently happy at their group's
/// tolerance. An empty group reports a mean of 1.
inline SimilarityReport similarity_report(const Network& net, const GroupAssignment& groups, const ModelParams& params) {
    SimilarityReport rep;
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (AgentId a = 0; a < net.size(); ++a) {
        const auto st = neighbor_stats(net, groups, a);
        const Group g = groups[a];
        double ratio = 1.0;
        if (st.total == 0) {
            ++rep.isolated;
        } else {
            ratio = static_cast<double>(st.same) / static_cast<double>(st.total);
        }
        const int idx = g == Group::one ? 0 : 1;
        sum[idx] += ratio;
        ++count[idx];
        rep.happy_count += is_happy(st.same, st.total, params.tolerance(g)) ? 1 : 0;
    }
    const std::size_t n = count[0] + count[1];
    rep.overall = n > 0 ? (sum[0] + sum[1]) / static_cast<double>(n) : 1.0;
    rep.group1 = count[0] > 0 ? sum[0] / static_cast<double>(count[0]) : 1.0;
    rep.group2 = count[1] > 0 ? sum[1] / static_cast<double>(count[1]) : 1.0;
    return rep;
}

}  // namespace schelling

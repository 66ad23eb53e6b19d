#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "schelling/metrics.hpp"
#include "schelling/model.hpp"
#include "schelling/spectral.hpp"

namespace schelling {

struct RunResult {
    ModelParams params;
    std::uint64_t seed = 0;
    bool stabilised = false;
    // 1-based index of the first step after which every agent was happy.
    std::optional<std::size_t> stabilisation_step;
    std::size_t steps_run = 0;
    SimilarityReport similarity;
    std::size_t stuck_activations = 0;
    std::size_t saturated_activations = 0;

    // Final graph; released once the spectrum has been taken if the caller
    // does not need it.
    std::shared_ptr<const Network> network;
    std::optional<SingularProfile> profile;
    std::optional<DimEstimate> dimension;
};

/// Runs the model until every agent is happy at the end of a step or
/// max_steps is reached. `observe` sees every activation.
template <class Observer = NullObserver>
RunResult run(const ModelParams& params, std::uint64_t seed, Observer&& observe = Observer{}) {
    Model model(params, seed);
    RunResult res;
    res.params = params;
    res.seed = seed;
    while (model.steps_taken() < params.max_steps) {
        const StepReport rep = model.step(observe);
        res.stuck_activations += rep.stuck;
        res.saturated_activations += rep.saturated;
        if (rep.all_happy_after) {
            res.stabilised = true;
            res.stabilisation_step = model.steps_taken();
            break;
        }
    }
    res.steps_run = model.steps_taken();
    res.similarity = similarity_report(model.network(), model.groups(), params);
    res.network = std::make_shared<const Network>(std::move(model.network()));
    return res;
}

/// Fills in the singular-value profile and the elbow dimension. K is capped
/// at the graph size.
inline void analyse_spectrum(RunResult& res, std::size_t k, bool keep_network = false) {
    if (!res.network) {
        throw std::logic_error("analyse_spectrum: network already released");
    }
    res.profile = singular_values(*res.network, std::min(k, res.network->size()));
    res.dimension = zhu_ghodsi_dim(*res.profile);
    if (!keep_network) {
        res.network.reset();
    }
}

}  // namespace schelling

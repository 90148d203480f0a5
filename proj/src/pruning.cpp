#include "rfreg/pruning.hpp"

#include <algorithm>
#include <cmath>

namespace rfreg {

PruneScope prune_scope_from_string(const std::string& s) {
    if (s == "global") return PruneScope::global;
    if (s == "per_layer") return PruneScope::per_layer;
    throw ValidationError("unknown prune scope '" + s + "' (expected global|per_layer)");
}

double prune_gamma(int ramp_epochs) {
    if (ramp_epochs < 1) throw ValidationError("ramp_epochs must be >= 1");
    return std::pow(0.001, 1.0 / ramp_epochs);
}

long schedule_pruned_count(int epoch, long total_prunable, long target_nonzero, int ramp_epochs,
                           double gamma) {
    if (epoch < 0) throw ValidationError("epoch must be >= 0");
    if (target_nonzero > total_prunable)
        throw ConfigError("prune target " + std::to_string(target_nonzero) + " exceeds prunable total " +
                          std::to_string(total_prunable));
    if (gamma <= 0.0) gamma = prune_gamma(ramp_epochs);
    long n_final = total_prunable - target_nonzero;
    if (epoch >= ramp_epochs) return n_final;
    double norm = 1.0 - std::pow(gamma, ramp_epochs);
    double frac = (1.0 - std::pow(gamma, epoch)) / norm;
    return std::lround(static_cast<double>(n_final) * frac);
}

void init_prune_state(PruneState& state, const Network& net) {
    if (state.gamma <= 0.0) state.gamma = prune_gamma(state.ramp_epochs);
    state.masks.clear();
    state.prunable_params.clear();
    state.total_prunable = 0;
    state.pruned_count = 0;
    for (std::size_t pi = 0; pi < net.params.size(); ++pi) {
        if (!net.params[pi].prunable) continue;
        state.prunable_params.push_back(pi);
        state.masks.emplace_back(net.params[pi].tensor->numel(), 1);
        state.total_prunable += static_cast<long>(net.params[pi].tensor->numel());
    }
    if (state.target_nonzero > state.total_prunable)
        throw ConfigError("prune target " + std::to_string(state.target_nonzero) +
                          " exceeds prunable total " + std::to_string(state.total_prunable));
}

namespace {

struct Candidate {
    float mag;
    std::uint32_t param;  // position in state.prunable_params
    std::uint32_t index;
};

void prune_smallest(Network& net, PruneState& state, std::vector<Candidate>& cands, long count) {
    auto cmp = [](const Candidate& a, const Candidate& b) {
        if (a.mag != b.mag) return a.mag < b.mag;
        if (a.param != b.param) return a.param < b.param;
        return a.index < b.index;
    };
    if (count < static_cast<long>(cands.size()))
        std::nth_element(cands.begin(), cands.begin() + count, cands.end(), cmp);
    std::sort(cands.begin(), cands.begin() + std::min<long>(count, cands.size()), cmp);
    for (long i = 0; i < count && i < static_cast<long>(cands.size()); ++i) {
        const auto& c = cands[i];
        state.masks[c.param][c.index] = 0;
        net.params[state.prunable_params[c.param]].tensor->at(c.index) = 0.0f;
    }
}

}  // namespace

void apply_magnitude_pruning(Network& net, PruneState& state, long new_pruned_count) {
    if (new_pruned_count < state.pruned_count)
        throw ValidationError("pruned count cannot decrease (" + std::to_string(new_pruned_count) + " < " +
                              std::to_string(state.pruned_count) + ")");
    if (new_pruned_count > state.total_prunable)
        throw ConfigError("pruned count " + std::to_string(new_pruned_count) + " exceeds prunable total " +
                          std::to_string(state.total_prunable));
    long extra = new_pruned_count - state.pruned_count;
    if (extra == 0) return;

    if (state.scope == PruneScope::global) {
        std::vector<Candidate> cands;
        cands.reserve(static_cast<std::size_t>(state.total_prunable - state.pruned_count));
        for (std::size_t mp = 0; mp < state.masks.size(); ++mp) {
            const Tensor& t = *net.params[state.prunable_params[mp]].tensor;
            for (std::size_t i = 0; i < t.numel(); ++i)
                if (state.masks[mp][i])
                    cands.push_back({std::fabs(t.at(i)), static_cast<std::uint32_t>(mp),
                                     static_cast<std::uint32_t>(i)});
        }
        prune_smallest(net, state, cands, extra);
    } else {
        // Per-layer: split the new total proportionally to layer size, the
        // remainder going to the earliest layers.
        double frac = static_cast<double>(new_pruned_count) / static_cast<double>(state.total_prunable);
        long assigned = 0;
        std::vector<long> quota(state.masks.size(), 0);
        for (std::size_t mp = 0; mp < state.masks.size(); ++mp) {
            long sz = static_cast<long>(state.masks[mp].size());
            quota[mp] = static_cast<long>(std::floor(frac * sz));
            assigned += quota[mp];
        }
        for (std::size_t mp = 0; mp < state.masks.size() && assigned < new_pruned_count; ++mp) {
            long room = static_cast<long>(state.masks[mp].size()) - quota[mp];
            long bump = std::min(room, new_pruned_count - assigned);
            quota[mp] += bump;
            assigned += bump;
        }
        for (std::size_t mp = 0; mp < state.masks.size(); ++mp) {
            long already = 0;
            for (auto b : state.masks[mp])
                if (!b) ++already;
            long want = quota[mp] - already;
            if (want <= 0) continue;
            const Tensor& t = *net.params[state.prunable_params[mp]].tensor;
            std::vector<Candidate> cands;
            for (std::size_t i = 0; i < t.numel(); ++i)
                if (state.masks[mp][i])
                    cands.push_back({std::fabs(t.at(i)), static_cast<std::uint32_t>(mp),
                                     static_cast<std::uint32_t>(i)});
            prune_smallest(net, state, cands, want);
        }
    }
    long pruned = 0;
    for (const auto& m : state.masks)
        for (auto b : m)
            if (!b) ++pruned;
    state.pruned_count = pruned;
}

void enforce_masks(Network& net, const PruneState& state) {
    for (std::size_t mp = 0; mp < state.masks.size(); ++mp) {
        Tensor& t = *net.params[state.prunable_params[mp]].tensor;
        for (std::size_t i = 0; i < t.numel(); ++i)
            if (!state.masks[mp][i]) t.at(i) = 0.0f;
    }
}

}  // namespace rfreg

#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <ponedge/engine.hpp>
#include <ponedge/orchestrator.hpp>

namespace ponedge::testing {

struct property_tally {
    std::size_t cases = 0;
    std::size_t argmin_failures = 0;
    std::size_t scale_failures = 0;
    std::size_t monotonicity_failures = 0;
    std::size_t single_failures = 0;

    [[nodiscard]] std::size_t failures() const
    {
        return argmin_failures + scale_failures + monotonicity_failures + single_failures;
    }
};

/// Exhaustive oracle: scores every candidate from the formula and keeps the
/// first strict minimum in id order.
inline std::uint32_t oracle_choice(const std::vector<orchestrator::candidate>& cs, double length,
                                   const orchestrator::layer_weights& w)
{
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& c : cs) {
        const double s = (c.queued_and_running + 1) * w.of(c.layer) * length / c.mips_per_core;
        if (s < best_score || (s == best_score && c.node.value < best)) {
            best = c.node.value;
            best_score = s;
        }
    }
    return best;
}

/// Randomized checks of the trade-off selector: argmin against the oracle,
/// invariance under scaling the task length, monotonicity in load, and the
/// single-candidate case for both strategies.
inline property_tally check_scheduler_properties(std::size_t cases, std::uint64_t seed)
{
    using namespace orchestrator;
    const layer kinds[] = {layer::edge_server, layer::cloud, layer::onu};
    const layer_weights w;
    auto rng = engine::make_stream(seed, "scheduler-properties");
    property_tally t;

    for (std::size_t i = 0; i < cases; ++i) {
        ++t.cases;
        const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 8);
        std::vector<candidate> cs;
        std::vector<std::uint32_t> ids;
        for (std::uint32_t id = 0; ids.size() < n; ++id) {
            if (rng.uniform() < 0.6) ids.push_back(id);
        }
        for (auto id : ids) {
            candidate c;
            c.node = node_id{id};
            c.layer = kinds[static_cast<std::size_t>(rng.uniform() * 3)];
            c.mips_per_core = rng.uniform(1.0e3, 3.0e6);
            c.queued_and_running = static_cast<int>(rng.uniform() * 30);
            // Exact duplicates of an earlier candidate exercise the tie-break.
            if (!cs.empty() && rng.uniform() < 0.15) {
                const auto& prev = cs[static_cast<std::size_t>(rng.uniform() * static_cast<double>(cs.size()))];
                c.layer = prev.layer;
                c.mips_per_core = prev.mips_per_core;
                c.queued_and_running = prev.queued_and_running;
            }
            cs.push_back(c);
        }
        // Candidate order handed to the selector is shuffled.
        for (std::size_t k = cs.size(); k > 1; --k) {
            std::swap(cs[k - 1], cs[static_cast<std::size_t>(rng.uniform() * static_cast<double>(k))]);
        }

        workload::task task;
        task.id = i;
        task.length_mi = rng.uniform(1.0, 1.0e5);

        const auto d = trade_off_select(task, cs, w);
        bool ok = d.breakdown.size() == cs.size() && d.chosen.value == oracle_choice(cs, task.length_mi, w);
        for (const auto& b : d.breakdown) ok = ok && !(b.score < d.score);
        if (!ok) ++t.argmin_failures;

        auto scaled = task;
        scaled.length_mi *= rng.uniform(1.0e-3, 1.0e3);
        if (trade_off_select(scaled, cs, w).chosen != d.chosen) ++t.scale_failures;

        auto loaded = cs;
        auto& victim = loaded[static_cast<std::size_t>(rng.uniform() * static_cast<double>(loaded.size()))];
        victim.queued_and_running += 1 + static_cast<int>(rng.uniform() * 10);
        const auto after = trade_off_select(task, loaded, w).chosen;
        if (after == victim.node && d.chosen != victim.node) ++t.monotonicity_failures;

        const std::vector<candidate> one{cs.front()};
        round_robin rr;
        if (trade_off_select(task, one, w).chosen != one.front().node || rr.select(task, one).chosen != one.front().node) {
            ++t.single_failures;
        }
    }
    return t;
}

} // namespace ponedge::testing

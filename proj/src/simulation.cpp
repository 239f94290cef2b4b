#include <ponedge/simulation.hpp>

#include <map>
#include <utility>

#include <fmt/format.h>

#include <ponedge/compute.hpp>
#include <ponedge/engine.hpp>

namespace ponedge {

namespace {

class edge_run {
public:
    edge_run(const run_config& cfg, const network::topology_spec& topology, std::vector<workload::task> tasks)
        : cfg_(cfg),
          topology_(topology),
          tasks_(std::move(tasks)),
          preset_(orchestrator::architecture(topology.preset, cfg.model.far_edge_execution)),
          scheduler_(cfg.strategy, cfg.model.weights),
          fabric_(sim_, topology_),
          placed_on_(tasks_.size())
    {
        nodes_.reserve(topology_.nodes.size());
        for (const auto& n : topology_.nodes) nodes_.emplace_back(n);
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            if (tasks_[i].id != i) throw simulation_error("task ids must equal their position");
            if (topology_.node(tasks_[i].source_device).layer != layer::far_edge_device) {
                throw config_error(fmt::format("task {} does not originate at a far-edge device", i));
            }
        }
        sim_.set_handler([this](const engine::event& ev) { dispatch(ev); });
        sim_.set_trace_sink(cfg_.trace);
    }

    run_result run()
    {
        for (const auto& t : tasks_) sim_.schedule(t.generated_at, engine::task_arrival{t.id});
        sim_.schedule(cfg_.duration_s, engine::simulation_end{});
        sim_.run_until(cfg_.duration_s);

        run_result out;
        out.info = {cfg_.scenario.name, topology_.preset, cfg_.cpu.label, cfg_.cpu.mips,
                    cfg_.seed,          cfg_.scenario.deadline_s, cfg_.model.strict_deadline};
        out.records.reserve(tasks_.size());
        for (auto& t : tasks_) {
            if (t.status != workload::task_status::delivered && t.status != workload::task_status::unfinished) {
                t.advance(workload::task_status::unfinished);
            }
            const auto& node = placed_on_[t.id];
            out.records.push_back(metrics::make_record(t, node ? topology_.node(*node).name : std::string{}));
        }
        out.summary = metrics::summarize(out.records, out.info);
        for (auto& n : nodes_) {
            if (!n.spec().can_execute()) continue;
            out.summary.utilization.push_back({n.spec().name, n.snapshot(cfg_.duration_s).mean_utilization});
        }
        metrics::verify(out.records, out.summary);
        out.trace_hash = sim_.trace_hash();
        out.events = sim_.processed();
        out.unplaced = unplaced_;
        return out;
    }

private:
    void dispatch(const engine::event& ev)
    {
        std::visit(
            [this](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, engine::task_arrival>) {
                    on_arrival(p.task);
                } else if constexpr (std::is_same_v<T, engine::transfer_complete>) {
                    fabric_.handle(p);
                } else if constexpr (std::is_same_v<T, engine::execution_start>) {
                    on_exec_start(p.task);
                } else if constexpr (std::is_same_v<T, engine::execution_complete>) {
                    on_exec_complete(p.task, p.node);
                } else if constexpr (std::is_same_v<T, engine::result_delivered>) {
                    on_delivered(p.task);
                }
            },
            ev.body);
    }

    const network::route& route_to(node_id device, node_id target)
    {
        auto [it, fresh] = routes_.try_emplace({device.value, target.value});
        if (fresh) it->second = network::route_between(topology_, device, target);
        return it->second;
    }

    void on_arrival(task_id id)
    {
        auto& t = tasks_[id];
        const auto now = sim_.now();
        const auto eligible = orchestrator::candidates(preset_, nodes_, t);
        if (eligible.empty()) {
            ++unplaced_;
            t.advance(workload::task_status::unfinished);
            return;
        }
        std::vector<orchestrator::candidate> view;
        view.reserve(eligible.size());
        for (auto n : eligible) {
            auto& state = nodes_[n.value];
            view.push_back({n, state.spec().layer, state.spec().mips_per_core(), state.snapshot(now).queued_and_running});
        }
        const auto decision = scheduler_.select(t, view);
        nodes_[decision.chosen.value].reserve(t.needs);
        nodes_[decision.chosen.value].expect();
        placed_on_[id] = decision.chosen;

        t.advance(workload::task_status::in_transit);
        fabric_.start_transfer(
            route_to(t.source_device, decision.chosen), t.request, [this, id](sim_time at) { on_uplink_done(id, at); },
            cfg_.model.control_plane_latency_s);
    }

    void on_uplink_done(task_id id, sim_time at)
    {
        auto& t = tasks_[id];
        t.uplink_done = at;
        t.advance(workload::task_status::queued);
        const auto node = *placed_on_[id];
        const auto slot = nodes_[node.value].submit(t.length_mi, at);
        sim_.schedule(slot.exec_start, engine::execution_start{id, node});
        sim_.schedule(slot.exec_end, engine::execution_complete{id, node});
    }

    void on_exec_start(task_id id)
    {
        auto& t = tasks_[id];
        t.exec_start = sim_.now();
        t.advance(workload::task_status::running);
    }

    void on_exec_complete(task_id id, node_id node)
    {
        auto& t = tasks_[id];
        t.exec_end = sim_.now();
        nodes_[node.value].release(t.needs);
        t.advance(workload::task_status::in_transit);
        fabric_.start_transfer(network::reversed(route_to(t.source_device, node)), t.result,
                               [this, id](sim_time at) { sim_.schedule(at, engine::result_delivered{id}); });
    }

    void on_delivered(task_id id)
    {
        auto& t = tasks_[id];
        t.delivered_at = sim_.now();
        t.advance(workload::task_status::delivered);
    }

    const run_config& cfg_;
    const network::topology_spec& topology_;
    std::vector<workload::task> tasks_;
    orchestrator::architecture_preset preset_;
    orchestrator::scheduler scheduler_;
    engine::simulator sim_;
    network::fabric fabric_;
    std::vector<compute::node_state> nodes_;
    std::vector<std::optional<node_id>> placed_on_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, network::route> routes_;
    std::size_t unplaced_ = 0;
};

} // namespace

run_result simulate(const run_config& cfg, const network::topology_spec& topology, std::vector<workload::task> tasks)
{
    if (!(cfg.duration_s > 0.0)) throw config_error("duration must be positive");
    edge_run run(cfg, topology, std::move(tasks));
    return run.run();
}

run_result simulate(const run_config& cfg)
{
    const auto topology = config::topology_preset(cfg.topology, cfg.scenario, cfg.cpu.mips, cfg.model);
    const auto devices = topology.nodes_in(layer::far_edge_device);
    workload::arrival_options opts;
    opts.mode = cfg.arrivals;
    opts.fixed_phase = cfg.fixed_phase;
    opts.needs = cfg.model.task_footprint;
    auto tasks = workload::generate_arrivals(cfg.scenario, cfg.duration_s, cfg.seed, devices, opts);
    return simulate(cfg, topology, std::move(tasks));
}

} // namespace ponedge

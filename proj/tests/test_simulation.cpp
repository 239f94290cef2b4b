#include <doctest.h>

#include <cmath>
#include <sstream>

#include <ponedge/simulation.hpp>

using namespace ponedge;

namespace {

run_config single_task(const std::string& topology)
{
    run_config cfg;
    cfg.scenario = workload::scenario_preset("smart-city");
    cfg.scenario.users = 1;
    cfg.topology = topology;
    cfg.cpu = {"AMD Phenom II X4 955", 43000.0};
    cfg.duration_s = 30.0;
    cfg.arrivals = workload::arrival_mode::fixed;
    cfg.fixed_phase = 0.0;
    return cfg;
}

double hop_time(double kb, double bandwidth, double length, double fixed)
{
    return kb * 8000.0 / bandwidth + length / 2.0e8 + fixed;
}

} // namespace

TEST_CASE("single task on the co-located edge")
{
    const auto r = simulate(single_task("genio"));
    REQUIRE(r.records.size() == 1);
    const auto& t = r.records[0];
    REQUIRE(t.delivered());
    CHECK(t.node == "edge");
    const double up = hop_time(1.0, 1.0e9, 100.0, 0.0);
    const double exec = 500.0 / 43000.0;
    const double down = hop_time(10.0, 1.0e9, 100.0, 0.0);
    CHECK(*t.uplink_done == doctest::Approx(up).epsilon(1e-12));
    CHECK(*t.exec_start == *t.uplink_done);
    CHECK(*t.exec_end - *t.exec_start == doctest::Approx(exec).epsilon(1e-12));
    CHECK(t.latency() == doctest::Approx(up + exec + down).epsilon(1e-12));
    // The nine-decimal rendering of the same sum.
    CHECK(std::abs(t.latency() - 0.011716907) <= 5e-10);
    CHECK(r.summary.tsr_pct == 100.0);
    CHECK(r.summary.deadline_hit_pct == 100.0);
}

TEST_CASE("single task behind the WAN hop")
{
    auto cfg = single_task("baseline");
    const auto r = simulate(cfg);
    REQUIRE(r.records[0].delivered());
    const auto& wan = cfg.model.wan;
    const double up = hop_time(1.0, 1.0e9, 100.0, 0.0) + hop_time(1.0, wan.bandwidth_bps, 100.0, wan.fixed_latency_s);
    const double down = hop_time(10.0, 1.0e9, 100.0, 0.0) + hop_time(10.0, wan.bandwidth_bps, 100.0, wan.fixed_latency_s);
    CHECK(r.records[0].latency() == doctest::Approx(up + 500.0 / 43000.0 + down).epsilon(1e-12));
}

TEST_CASE("control-plane latency shifts the uplink")
{
    auto cfg = single_task("genio");
    const double base = simulate(cfg).records[0].latency();
    cfg.model.control_plane_latency_s = 0.004;
    const auto r = simulate(cfg);
    CHECK(r.records[0].latency() == doctest::Approx(base + 0.004).epsilon(1e-12));
}

TEST_CASE("tasks nobody can host stay unfinished")
{
    auto cfg = single_task("genio");
    cfg.model.task_footprint = {1.0e9, 1.0};
    const auto r = simulate(cfg);
    CHECK(r.unplaced == 1);
    CHECK(r.summary.tasks_unfinished == 1);
    CHECK(r.summary.tsr_pct == 0.0);
    CHECK(std::isnan(r.summary.mean_latency_s));
    CHECK(r.records[0].node.empty());
}

TEST_CASE("work still in flight at the end is unfinished")
{
    auto cfg = single_task("genio");
    cfg.cpu = {"slow", 10.0};
    cfg.model.cloud.mips = 10.0;
    cfg.model.cloud.cores = 1;
    const auto r = simulate(cfg);
    CHECK(r.summary.tasks_generated == 1);
    CHECK(r.summary.tasks_delivered == 0);
    CHECK(r.records[0].status == workload::task_status::unfinished);
    CHECK(r.records[0].exec_start.has_value());
    CHECK_FALSE(r.records[0].exec_end.has_value());
}

TEST_CASE("conservation and decomposition hold on every preset")
{
    for (const auto& name : workload::preset_names()) {
        for (const char* topology : {"genio", "baseline"}) {
            run_config cfg;
            cfg.scenario = workload::scenario_preset(name);
            cfg.topology = topology;
            cfg.cpu = config::cpu_grid(name).front();
            cfg.duration_s = 60.0;
            cfg.seed = 3;
            const auto r = simulate(cfg);
            CHECK(r.summary.tasks_generated == r.summary.tasks_delivered + r.summary.tasks_unfinished);
            CHECK_NOTHROW(metrics::verify(r.records, r.summary, 1e-12));
            for (const auto& u : r.summary.utilization) {
                CHECK(u.utilization >= 0.0);
                CHECK(u.utilization <= 1.0);
            }
        }
    }
}

TEST_CASE("runs are deterministic")
{
    run_config cfg;
    cfg.scenario = workload::scenario_preset("smart-building");
    cfg.cpu = config::cpu_grid("smart-building")[1];
    cfg.duration_s = 60.0;
    std::ostringstream t1, t2;
    cfg.trace = &t1;
    const auto a = simulate(cfg);
    cfg.trace = &t2;
    const auto b = simulate(cfg);
    CHECK(a.trace_hash == b.trace_hash);
    CHECK(a.events == b.events);
    CHECK(t1.str() == t2.str());
    cfg.seed = 2;
    cfg.trace = nullptr;
    CHECK(simulate(cfg).trace_hash != a.trace_hash);
}

TEST_CASE("round robin alternates between edge and cloud")
{
    auto cfg = single_task("genio");
    cfg.scenario.rate_per_min = 60.0;
    cfg.duration_s = 4.0;
    cfg.strategy = orchestrator::strategy::round_robin;
    const auto r = simulate(cfg);
    REQUIRE(r.records.size() == 4);
    CHECK(r.records[0].node == "edge");
    CHECK(r.records[1].node == "cloud");
    CHECK(r.records[2].node == "edge");
    CHECK(r.records[3].node == "cloud");
}

TEST_CASE("far-edge execution lets ONUs take work")
{
    run_config cfg;
    cfg.scenario = workload::scenario_preset("smart-city");
    cfg.cpu = {"tiny", 1000.0};
    cfg.duration_s = 60.0;
    cfg.model.cloud = {1000.0, 1, 32768.0, 1048576.0};
    cfg.model.far_edge_execution = true;
    const auto r = simulate(cfg);
    std::size_t on_onu = 0;
    for (const auto& t : r.records) on_onu += t.node.rfind("onu-", 0) == 0 ? 1 : 0;
    CHECK(on_onu > 0);
}

TEST_CASE("strict deadline mode lowers tsr but not deliveries")
{
    run_config cfg;
    cfg.scenario = workload::scenario_preset("e-health");
    cfg.cpu = {"slowish", 30000.0};
    cfg.duration_s = 30.0;
    const auto lenient = simulate(cfg);
    cfg.model.strict_deadline = true;
    const auto strict = simulate(cfg);
    CHECK(strict.summary.tasks_delivered == lenient.summary.tasks_delivered);
    CHECK(strict.summary.tsr_pct <= lenient.summary.tsr_pct);
    CHECK(strict.summary.tsr_pct == doctest::Approx(lenient.summary.deadline_hit_pct * lenient.summary.tsr_pct / 100.0));
}

TEST_CASE("tasks must come from far-edge devices")
{
    auto cfg = single_task("genio");
    const auto topo = config::topology_preset("genio", cfg.scenario, 43000.0);
    workload::task t;
    t.source_device = topo.find("edge");
    t.length_mi = 1.0;
    CHECK_THROWS_AS(simulate(cfg, topo, {t}), config_error);
    cfg.duration_s = 0.0;
    CHECK_THROWS_AS(simulate(cfg), config_error);
}

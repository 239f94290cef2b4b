#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <ponedge/metrics.hpp>

using namespace ponedge;
using namespace ponedge::metrics;

namespace {

task_record delivered(task_id id, double gen, double up, double start, double end, double at, double deadline = 0.5)
{
    task_record r;
    r.id = id;
    r.node = "edge";
    r.generated_at = gen;
    r.uplink_done = up;
    r.exec_start = start;
    r.exec_end = end;
    r.delivered_at = at;
    r.status = workload::task_status::delivered;
    r.deadline_s = deadline;
    return r;
}

task_record unfinished(task_id id, double gen)
{
    task_record r;
    r.id = id;
    r.generated_at = gen;
    r.status = workload::task_status::unfinished;
    r.deadline_s = 0.5;
    return r;
}

run_info info_for(const std::string& scenario = "smart-city", std::uint64_t seed = 1)
{
    return {scenario, "genio", "AMD Phenom II X4 955", 43000.0, seed, 0.5, false};
}

run_summary with_mean(double mean, const std::string& topology, std::uint64_t seed = 1)
{
    run_summary s;
    s.scenario = "e-health";
    s.topology = topology;
    s.cpu = "Intel Core i7 3930K";
    s.mips = 220000.0;
    s.seed = seed;
    s.mean_latency_s = mean;
    return s;
}

} // namespace

TEST_CASE("all delivered on time")
{
    std::vector<task_record> rs;
    for (task_id i = 0; i < 10; ++i) rs.push_back(delivered(i, i, i + 0.01, i + 0.01, i + 0.02, i + 0.03));
    const auto s = summarize(rs, info_for());
    CHECK(s.tasks_generated == 10);
    CHECK(s.tsr_pct == 100.0);
    CHECK(s.deadline_hit_pct == 100.0);
    CHECK(s.mean_latency_s == doctest::Approx(0.03));
}

TEST_CASE("eight of ten delivered")
{
    std::vector<task_record> rs;
    for (task_id i = 0; i < 8; ++i) rs.push_back(delivered(i, 0, 0.1, 0.1, 0.2, 0.3 + 0.1 * i));
    rs.push_back(unfinished(8, 1.0));
    rs.push_back(unfinished(9, 2.0));
    const auto s = summarize(rs, info_for());
    CHECK(s.tsr_pct == doctest::Approx(80.0));
    CHECK(s.tasks_unfinished == 2);
    // Latencies 0.3 .. 1.0, two of them within 0.5 s.
    CHECK(s.deadline_hit_pct == doctest::Approx(37.5));
    CHECK(s.p95_latency_s == doctest::Approx(1.0));
    CHECK_NOTHROW(verify(rs, s));
}

TEST_CASE("strict mode counts deadline misses as failures")
{
    std::vector<task_record> rs{delivered(0, 0, 0.1, 0.1, 0.2, 0.3), delivered(1, 0, 0.1, 0.1, 0.6, 0.7)};
    auto info = info_for();
    CHECK(summarize(rs, info).tsr_pct == 100.0);
    info.strict_deadline = true;
    const auto s = summarize(rs, info);
    CHECK(s.tsr_pct == 50.0);
    CHECK(s.tasks_delivered == 2);
}

TEST_CASE("mean latency is the sum of the phases")
{
    const double up = 8.5e-6, exec = 500.0 / 43000.0, down = 8.05e-5;
    std::vector<task_record> rs{delivered(0, 1.0, 1.0 + up, 1.0 + up, 1.0 + up + exec, 1.0 + up + exec + down)};
    const auto s = summarize(rs, info_for());
    CHECK(s.mean_latency_s == doctest::Approx(up + exec + down).epsilon(1e-12));
    CHECK(s.mean_latency_s == doctest::Approx(0.0117169).epsilon(1e-5));
    CHECK_NOTHROW(verify(rs, s));
}

TEST_CASE("no tasks is an empty run")
{
    CHECK_THROWS_AS(summarize({}, info_for()), empty_run);
}

TEST_CASE("verify catches broken invariants")
{
    std::vector<task_record> rs{delivered(0, 0, 0.1, 0.1, 0.2, 0.3)};
    auto s = summarize(rs, info_for());
    s.tasks_unfinished = 1;
    CHECK_THROWS_AS(verify(rs, s), simulation_error);

    auto bad = rs;
    bad[0].exec_start = 0.05;
    CHECK_THROWS_AS(verify(bad, summarize(bad, info_for())), simulation_error);
}

TEST_CASE("compare arithmetic")
{
    CHECK(compare(with_mean(0.65, "genio"), with_mean(1.0, "baseline")) == doctest::Approx(-35.0));
    CHECK(compare(with_mean(0.4, "genio"), with_mean(0.4, "baseline")) == 0.0);
    const double fwd = compare(with_mean(0.3, "genio"), with_mean(0.5, "baseline"));
    const double back = compare(with_mean(0.5, "baseline"), with_mean(0.3, "genio"));
    CHECK(fwd < 0.0);
    CHECK(back > 0.0);

    auto other = with_mean(1.0, "baseline");
    other.scenario = "smart-city";
    CHECK_THROWS_AS(compare(with_mean(0.65, "genio"), other), incomparable_runs);
    CHECK_THROWS_AS(compare(with_mean(0.65, "genio", 1), with_mean(1.0, "baseline", 2)), incomparable_runs);
}

TEST_CASE("aggregation groups, sorts and averages")
{
    std::vector<run_summary> runs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto s = with_mean(0.1 * static_cast<double>(seed), "genio", seed);
        s.tsr_pct = 100.0;
        runs.push_back(s);
    }
    const group_key keys[] = {group_key::scenario, group_key::topology, group_key::cpu};
    auto rows = aggregate(runs, keys);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].runs == 5);
    CHECK(rows[0].mean_latency_s.mean == doctest::Approx(0.3));
    CHECK(rows[0].mean_latency_s.stddev == doctest::Approx(std::sqrt(0.025)));
    CHECK(rows[0].tsr_pct.stddev == 0.0);

    auto slow = with_mean(0.9, "genio");
    slow.cpu = "Intel Core i7 5960X";
    slow.mips = 300000.0;
    auto fast = with_mean(0.2, "genio");
    fast.cpu = "AMD FX 8320";
    fast.mips = 80000.0;
    const std::vector<run_summary> two{slow, fast};
    rows = aggregate(two, keys);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mips == 80000.0);
    CHECK(rows[1].mips == 300000.0);

    const std::vector<run_summary> one{slow};
    CHECK(aggregate(one, keys)[0].mean_latency_s.stddev == 0.0);
}

TEST_CASE("decimal formatting")
{
    CHECK(format_decimal(0.0) == "0");
    CHECK(format_decimal(43000.0) == "43000");
    CHECK(format_decimal(std::nan("")) == "nan");
    CHECK(format_decimal(8.5e-6) == "0.00000850000000000");
    CHECK(format_decimal(0.011716907).find('e') == std::string::npos);
    for (double v : {1.0 / 3.0, 0.0117169069767, 123.456789012345, 2.5e-9}) {
        CHECK(std::stod(format_decimal(v)) == doctest::Approx(v).epsilon(1e-11));
    }
}

TEST_CASE("csv layouts")
{
    std::vector<task_record> rs{delivered(0, 0, 0.1, 0.1, 0.2, 0.3), unfinished(1, 0.5)};
    std::ostringstream tasks;
    write_tasks_csv(tasks, rs, info_for());
    std::istringstream lines(tasks.str());
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(header ==
          "task_id,scenario,topology,cpu,seed,node_id,generated_at,uplink_done,exec_start,exec_end,delivered_at,status,"
          "latency_s,deadline_met");
    CHECK(split_csv_line(first).size() == 14);
    CHECK(split_csv_line(first)[11] == "Delivered");
    CHECK(split_csv_line(second)[11] == "Unfinished");

    const auto s = summarize(rs, info_for());
    std::ostringstream sum;
    const std::vector<run_summary> ss{s};
    write_summary_csv(sum, ss);
    CHECK(sum.str().rfind(
              "scenario,topology,cpu,mips,seed,tasks_generated,tasks_delivered,tsr_pct,mean_latency_s,p95_latency_s,"
              "deadline_hit_pct\n",
              0) == 0);
    std::istringstream in(sum.str());
    const auto back = read_summary_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].tsr_pct == s.tsr_pct);
    CHECK(back[0].mean_latency_s == doctest::Approx(s.mean_latency_s).epsilon(1e-12));
    CHECK(back[0].cpu == s.cpu);
    CHECK(back[0].tasks_unfinished == 1);
}

TEST_CASE("csv fields with commas are quoted")
{
    CHECK(split_csv_line("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
    CHECK(split_csv_line("x,\"he said \"\"hi\"\"\",") == std::vector<std::string>{"x", "he said \"hi\"", ""});
}

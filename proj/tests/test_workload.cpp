#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <ponedge/workload.hpp>

using namespace ponedge;
using namespace ponedge::workload;

namespace {

std::vector<node_id> devices(int n)
{
    std::vector<node_id> out;
    for (int i = 0; i < n; ++i) out.emplace_back(static_cast<std::uint32_t>(i));
    return out;
}

} // namespace

TEST_CASE("scenario presets match the parameter table")
{
    const auto sc = scenario_preset("smart-city");
    CHECK(sc.users == 128);
    CHECK(sc.rate_per_min == 2.0);
    CHECK(sc.deadline_s == 0.5);
    CHECK(sc.length_mi == 500.0);
    CHECK(sc.request.kilobytes == 1.0);
    CHECK(sc.result.kilobytes == 10.0);

    const auto eh = scenario_preset("e-health");
    CHECK(eh.users == 10);
    CHECK(eh.rate_per_min == 60.0);
    CHECK(eh.deadline_s == 0.05);
    CHECK(eh.length_mi == 1000.0);
    CHECK(eh.request.kilobytes == 10.0);
    CHECK(eh.result.kilobytes == 10.0);

    const auto sb = scenario_preset("smart-building");
    CHECK(sb.users == 20);
    CHECK(sb.rate_per_min == 60.0);
    CHECK(sb.deadline_s == 0.2);
    CHECK(sb.length_mi == 5000.0);
    CHECK(sb.request.kilobytes == 750.0);
    CHECK(sb.result.kilobytes == 500.0);

    const auto ai = scenario_preset("aigc");
    CHECK(ai.users == 50);
    CHECK(ai.rate_per_min == 20.0);
    CHECK(ai.deadline_s == 0.5);
    CHECK(ai.length_mi == 48000.0);
    CHECK(ai.request.kilobytes == 5000.0);
    CHECK(ai.result.kilobytes == 2000.0);

    CHECK(preset_names().size() == 4);
    CHECK(data_size{1.0}.bits() == 8000.0);
}

TEST_CASE("unknown scenario names are rejected with the valid list")
{
    try {
        (void)scenario_preset("smartcity");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("smartcity") != std::string::npos);
        CHECK(msg.find("smart-city") != std::string::npos);
        CHECK(msg.find("aigc") != std::string::npos);
    }
}

TEST_CASE("scenario validation names the bad field")
{
    auto s = scenario_preset("aigc");
    s.rate_per_min = 0.0;
    CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("rate"), config_error);
}

TEST_CASE("fixed arrivals are evenly spaced")
{
    scenario_spec s = scenario_preset("e-health");
    s.users = 1;
    arrival_options opts;
    opts.mode = arrival_mode::fixed;
    opts.fixed_phase = 0.0;
    const auto devs = devices(1);
    const auto tasks = generate_arrivals(s, 60.0, 1, devs, opts);
    REQUIRE(tasks.size() == 60);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        CHECK(tasks[i].generated_at == doctest::Approx(static_cast<double>(i)));
        CHECK(tasks[i].id == i);
    }
}

TEST_CASE("fixed arrivals draw a phase inside one interval")
{
    const auto s = scenario_preset("smart-city");
    arrival_options opts;
    opts.mode = arrival_mode::fixed;
    const auto devs = devices(s.users);
    const auto tasks = generate_arrivals(s, 600.0, 4, devs, opts);
    CHECK(tasks.size() == 128 * 20);
    for (const auto& t : tasks) CHECK(t.generated_at < 600.0);
}

TEST_CASE("every task carries the scenario's parameters and lists are sorted")
{
    const auto s = scenario_preset("smart-building");
    const auto devs = devices(s.users);
    const auto tasks = generate_arrivals(s, 120.0, 7, devs);
    REQUIRE_FALSE(tasks.empty());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        CHECK(t.id == i);
        CHECK(t.length_mi == s.length_mi);
        CHECK(t.request == s.request);
        CHECK(t.result == s.result);
        CHECK(t.deadline_s == s.deadline_s);
        CHECK(t.status == task_status::pending);
        CHECK(t.generated_at >= 0.0);
        CHECK(t.generated_at < 120.0);
        if (i > 0) {
            const auto& p = tasks[i - 1];
            CHECK((p.generated_at < t.generated_at ||
                   (p.generated_at == t.generated_at && p.source_device.value <= t.source_device.value)));
        }
    }
}

TEST_CASE("generation is deterministic per seed")
{
    const auto s = scenario_preset("aigc");
    const auto devs = devices(s.users);
    const auto a = generate_arrivals(s, 300.0, 3, devs);
    const auto b = generate_arrivals(s, 300.0, 3, devs);
    const auto c = generate_arrivals(s, 300.0, 4, devs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].generated_at == b[i].generated_at);
        CHECK(a[i].source_device == b[i].source_device);
    }
    bool differs = a.size() != c.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = a[i].generated_at != c[i].generated_at;
    CHECK(differs);
}

TEST_CASE("poisson task count averages 2560 for smart-city")
{
    const auto s = scenario_preset("smart-city");
    const auto devs = devices(s.users);
    const int seeds = 40;
    double sum = 0.0;
    for (int seed = 1; seed <= seeds; ++seed) sum += static_cast<double>(generate_arrivals(s, 600.0, seed, devs).size());
    const double mean = sum / seeds;
    // Count is Poisson(2560); the sample mean has sigma sqrt(2560 / seeds).
    CHECK(std::abs(mean - 2560.0) <= 3.0 * std::sqrt(2560.0 / seeds));
}

TEST_CASE("poisson inter-arrivals pass a Kolmogorov-Smirnov test")
{
    for (const auto& name : preset_names()) {
        auto s = scenario_preset(name);
        s.users = 1;
        const double mean = s.mean_interval();
        const double horizon = mean * 20000.0;
        const auto devs = devices(1);
        const auto tasks = generate_arrivals(s, horizon, 99, devs);
        std::vector<double> gaps;
        for (std::size_t i = 1; i < tasks.size(); ++i) gaps.push_back(tasks[i].generated_at - tasks[i - 1].generated_at);
        REQUIRE(gaps.size() >= 10000);
        std::sort(gaps.begin(), gaps.end());
        const double n = static_cast<double>(gaps.size());
        double d = 0.0;
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            const double cdf = 1.0 - std::exp(-gaps[i] / mean);
            d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - cdf)});
        }
        // Critical value at alpha = 0.01.
        CHECK(d < 1.628 / std::sqrt(n));
    }
}

TEST_CASE("task lifecycle only follows legal transitions")
{
    task t;
    CHECK_THROWS_AS(t.advance(task_status::running), simulation_error);
    t.advance(task_status::in_transit);
    t.advance(task_status::queued);
    t.advance(task_status::running);
    t.exec_end = 1.0;
    t.advance(task_status::in_transit);
    t.advance(task_status::delivered);
    CHECK_THROWS_AS(t.advance(task_status::unfinished), simulation_error);

    task u;
    u.advance(task_status::unfinished);
    CHECK(to_string(task_status::delivered) == "Delivered");
    CHECK(parse_arrival_mode("fixed") == arrival_mode::fixed);
    CHECK_THROWS_AS(parse_arrival_mode("bursty"), config_error);
}

#include <ponedge/engine.hpp>

#include <bit>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace ponedge::engine {

namespace {

constexpr std::uint64_t fnv_prime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t word)
{
    for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xffU;
        h *= fnv_prime;
    }
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct subject_ids {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t c = 0;
    std::uint64_t d = 0;
};

subject_ids subjects(const payload& body)
{
    return std::visit(
        [](const auto& p) -> subject_ids {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, task_arrival> || std::is_same_v<T, result_delivered>) {
                return {p.task, 0, 0, 0};
            } else if constexpr (std::is_same_v<T, transfer_complete>) {
                return {static_cast<std::uint64_t>(p.stage), p.link, p.transfer, p.hop};
            } else if constexpr (std::is_same_v<T, execution_start> || std::is_same_v<T, execution_complete>) {
                return {p.task, p.node.value, 0, 0};
            } else {
                return {};
            }
        },
        body);
}

} // namespace

std::string_view kind_name(const payload& body)
{
    static constexpr std::string_view names[] = {"TaskArrival",        "TransferComplete", "ExecutionStart",
                                                 "ExecutionComplete",  "ResultDelivered",  "SimulationEnd"};
    return names[body.index()];
}

std::string trace_line(const event& ev)
{
    const auto& body = ev.body;
    std::string ids;
    if (const auto* t = std::get_if<transfer_complete>(&body)) {
        if (t->stage == transfer_complete::phase::link_drain) {
            ids = fmt::format("link={} epoch={}", t->link, t->epoch);
        } else {
            ids = fmt::format("transfer={} hop={}", t->transfer, t->hop);
        }
    } else if (const auto* a = std::get_if<task_arrival>(&body)) {
        ids = fmt::format("task={}", a->task);
    } else if (const auto* s = std::get_if<execution_start>(&body)) {
        ids = fmt::format("task={} node={}", s->task, s->node.value);
    } else if (const auto* c = std::get_if<execution_complete>(&body)) {
        ids = fmt::format("task={} node={}", c->task, c->node.value);
    } else if (const auto* r = std::get_if<result_delivered>(&body)) {
        ids = fmt::format("task={}", r->task);
    }
    return fmt::format("{:.17g}\t{}\t{}\t{}", ev.time, ev.seq, kind_name(body), ids);
}

std::uint64_t simulator::schedule(sim_time time, payload body)
{
    if (!(time >= clock_)) {
        throw simulation_error(fmt::format("event {} scheduled at t={:.17g} before clock t={:.17g}",
                                           kind_name(body), time, clock_));
    }
    const auto seq = next_seq_++;
    queue_.push(event{time, seq, std::move(body)});
    return seq;
}

std::size_t simulator::run_until(sim_time t_end)
{
    if (t_end < clock_) {
        throw simulation_error(fmt::format("run_until({:.17g}) before clock {:.17g}", t_end, clock_));
    }
    std::size_t count = 0;
    while (!queue_.empty() && queue_.top().time <= t_end) {
        event ev = queue_.top();
        queue_.pop();
        clock_ = ev.time;
        record(ev);
        ++count;
        if (on_event_) on_event_(ev);
    }
    clock_ = t_end;
    return count;
}

void simulator::record(const event& ev)
{
    ++processed_;
    fnv_mix(trace_hash_, std::bit_cast<std::uint64_t>(ev.time));
    fnv_mix(trace_hash_, ev.seq);
    fnv_mix(trace_hash_, ev.body.index());
    const auto ids = subjects(ev.body);
    fnv_mix(trace_hash_, ids.a);
    fnv_mix(trace_hash_, ids.b);
    fnv_mix(trace_hash_, ids.c);
    fnv_mix(trace_hash_, ids.d);
    if (trace_sink_ != nullptr) *trace_sink_ << trace_line(ev) << '\n';
}

random_stream::random_stream(std::uint64_t seed, std::string_view label)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label) {
        h ^= ch;
        h *= fnv_prime;
    }
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ h);
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    gen_.seed(seq);
}

double random_stream::uniform()
{
    // 53 random mantissa bits; never returns 1.0.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double random_stream::exponential(double mean)
{
    return -mean * std::log1p(-uniform());
}

random_stream make_stream(std::uint64_t seed, std::string_view label)
{
    return random_stream(seed, label);
}

} // namespace ponedge::engine

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include <ponedge/types.hpp>

namespace ponedge::engine {

struct task_arrival {
    task_id task;
};

/// Network progress. `link_drain` re-examines a link's active transfers at the
/// epoch it was scheduled for; `hop_arrival` marks a transfer reaching the far
/// end of one hop of its route.
struct transfer_complete {
    enum class phase : std::uint8_t { link_drain, hop_arrival };

    phase stage;
    std::uint32_t link;
    std::uint64_t epoch;
    std::uint64_t transfer;
    std::uint32_t hop;
};

struct execution_start {
    task_id task;
    node_id node;
};

struct execution_complete {
    task_id task;
    node_id node;
};

struct result_delivered {
    task_id task;
};

struct simulation_end {};

using payload = std::variant<task_arrival, transfer_complete, execution_start, execution_complete,
                             result_delivered, simulation_end>;

struct event {
    sim_time time;
    std::uint64_t seq;
    payload body;
};

std::string_view kind_name(const payload& body);

/// Tab-separated trace line: time, seq, kind, subject ids.
std::string trace_line(const event& ev);

/// Event queue and virtual clock for one run. Single-threaded.
class simulator {
public:
    using handler = std::function<void(const event&)>;

    simulator() = default;
    explicit simulator(handler on_event) : on_event_(std::move(on_event)) {}

    void set_handler(handler on_event) { on_event_ = std::move(on_event); }

    /// Events with equal time are dequeued in scheduling order.
    /// Throws simulation_error if `time` precedes the clock.
    std::uint64_t schedule(sim_time time, payload body);

    /// Processes every event with time <= t_end, then sets the clock to t_end.
    std::size_t run_until(sim_time t_end);

    [[nodiscard]] sim_time now() const { return clock_; }
    [[nodiscard]] std::size_t pending() const { return queue_.size(); }
    [[nodiscard]] std::uint64_t processed() const { return processed_; }

    /// FNV-1a over the binary form of every processed event.
    [[nodiscard]] std::uint64_t trace_hash() const { return trace_hash_; }

    /// Optional per-event text dump; the stream must outlive the run.
    void set_trace_sink(std::ostream* sink) { trace_sink_ = sink; }

private:
    struct later {
        bool operator()(const event& a, const event& b) const
        {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void record(const event& ev);

    std::priority_queue<event, std::vector<event>, later> queue_;
    handler on_event_;
    sim_time clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t trace_hash_ = 0xcbf29ce484222325ULL;
    std::ostream* trace_sink_ = nullptr;
};

/// Deterministic generator keyed by (seed, label). Streams with different
/// labels are statistically independent, so consumption in one module never
/// shifts another module's draws.
class random_stream {
public:
    random_stream(std::uint64_t seed, std::string_view label);

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double mean);

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

random_stream make_stream(std::uint64_t seed, std::string_view label);

} // namespace ponedge::engine

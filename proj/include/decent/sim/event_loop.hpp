#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include <sodium.h>

namespace decent::sim {

using Micros = std::int64_t;

/// What simulated time is being spent on.
enum class Category : std::uint8_t { network = 0, proxy, crypto, count };

const char* to_string(Category c) noexcept;

/// Discrete-event core: events run in (time, sequence) order. Every executed event and every
/// direct clock advance is folded into a running trace digest.
class EventLoop {
public:
    using Action = std::function<void()>;

    EventLoop();

    Micros now() const { return now_; }
    /// `kind`, `a` and `b` only feed the trace.
    void at(Micros time, std::uint32_t kind, std::uint64_t a, std::uint64_t b, Action action);
    /// Runs the next event; false when none is pending.
    bool step();
    /// Discards pending events.
    void clear();
    bool idle() const { return queue_.empty(); }

    /// Charges time that is not tied to a message, e.g. modeled crypto work.
    void advance(Micros delta, Category category);

    /// Category charged when events move the clock.
    Category category() const { return category_; }
    void set_category(Category c) { category_ = c; }

    const std::array<Micros, static_cast<std::size_t>(Category::count)>& spent() const { return spent_; }
    std::uint64_t events() const { return executed_; }
    /// Digest of the trace so far.
    std::array<std::uint8_t, 32> trace_digest() const;

private:
    struct Event {
        Micros time;
        std::uint64_t seq;
        std::uint32_t kind;
        std::uint64_t a, b;
        Action action;
    };
    struct Later {
        bool operator()(const Event& x, const Event& y) const {
            return x.time != y.time ? x.time > y.time : x.seq > y.seq;
        }
    };

    void move_clock(Micros to, Category c);
    void record(std::uint64_t v0, std::uint64_t v1, std::uint64_t v2, std::uint64_t v3);

    Micros now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t executed_ = 0;
    Category category_ = Category::network;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::array<Micros, static_cast<std::size_t>(Category::count)> spent_{};
    crypto_generichash_state trace_;
};

/// Sets the loop's category for a scope.
class CategoryScope {
public:
    CategoryScope(EventLoop& loop, Category c) : loop_(loop), saved_(loop.category()) { loop.set_category(c); }
    ~CategoryScope() { loop_.set_category(saved_); }
    CategoryScope(const CategoryScope&) = delete;
    CategoryScope& operator=(const CategoryScope&) = delete;

private:
    EventLoop& loop_;
    Category saved_;
};

}  // namespace decent::sim

#include "decent/sim/event_loop.hpp"

#include "decent/common/error.hpp"

namespace decent::sim {

const char* to_string(Category c) noexcept {
    switch (c) {
        case Category::network: return "network";
        case Category::proxy: return "proxy";
        case Category::crypto: return "crypto";
        case Category::count: break;
    }
    return "?";
}

EventLoop::EventLoop() {
    if (sodium_init() < 0) throw Error(Errc::io_error, "libsodium initialisation failed");
    crypto_generichash_init(&trace_, nullptr, 0, 32);
}

void EventLoop::record(std::uint64_t v0, std::uint64_t v1, std::uint64_t v2, std::uint64_t v3) {
    std::array<std::uint8_t, 32> buf{};
    const std::uint64_t vs[] = {v0, v1, v2, v3};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 8; ++j) buf[i * 8 + j] = static_cast<std::uint8_t>(vs[i] >> (56 - 8 * j));
    crypto_generichash_update(&trace_, buf.data(), buf.size());
}

void EventLoop::at(Micros time, std::uint32_t kind, std::uint64_t a, std::uint64_t b, Action action) {
    if (time < now_) throw Error(Errc::invalid_argument, "event scheduled in the past");
    queue_.push({time, seq_++, kind, a, b, std::move(action)});
}

bool EventLoop::step() {
    if (queue_.empty()) return false;
    auto ev = queue_.top();
    queue_.pop();
    move_clock(ev.time, category_);
    ++executed_;
    record(static_cast<std::uint64_t>(ev.time), ev.kind, ev.a, ev.b);
    ev.action();
    return true;
}

void EventLoop::clear() { queue_ = {}; }

void EventLoop::move_clock(Micros to, Category c) {
    spent_[static_cast<std::size_t>(c)] += to - now_;
    now_ = to;
}

void EventLoop::advance(Micros delta, Category category) {
    if (delta < 0) throw Error(Errc::invalid_argument, "negative time advance");
    move_clock(now_ + delta, category);
    record(static_cast<std::uint64_t>(now_), 0xffffffffu, static_cast<std::uint64_t>(category), static_cast<std::uint64_t>(delta));
}

std::array<std::uint8_t, 32> EventLoop::trace_digest() const {
    auto copy = trace_;
    std::array<std::uint8_t, 32> out{};
    crypto_generichash_final(&copy, out.data(), out.size());
    return out;
}

}  // namespace decent::sim

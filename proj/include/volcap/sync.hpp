#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "volcap/error.hpp"

namespace volcap {

enum class Channel : std::uint8_t { depth = 0, color = 1 };

/// One half of a frame in flight: which channel, which frame, when it was
/// sent and when it arrived (milliseconds of stream time). payload_index is
/// an opaque reference back to the source frame sequence.
struct StreamPacket {
    Channel channel = Channel::depth;
    std::uint32_t frame_number = 0;
    double send_time_ms = 0.0;
    double arrival_time_ms = 0.0;
    std::size_t payload_index = 0;
};

struct SyncPolicy {
    double out_of_order_wait_ms = 100.0;  // grace period for the missing half
    double max_lag_ms = 200.0;            // stream-time lag that forces a jump
    double delivery_fps = 15.0;           // rate frames are forwarded at
    double capture_fps = 30.0;            // rate frame numbers advance at
};

enum class SyncAction : std::uint8_t { render = 0, skip = 1, jump_to = 2, wait = 3 };

inline const char* to_string(SyncAction a) {
    switch (a) {
        case SyncAction::render: return "render";
        case SyncAction::skip: return "skip";
        case SyncAction::jump_to: return "jump_to";
        case SyncAction::wait: return "wait";
    }
    return "?";
}

struct RenderDecision {
    double time_ms = 0.0;
    SyncAction action = SyncAction::wait;
    std::uint32_t frame_number = 0;
};

/// What ultimately happened to a frame that appeared in the packet stream.
enum class FrameOutcome : std::uint8_t { rendered = 0, skipped = 1, superseded = 2 };

struct SyncRun {
    std::vector<RenderDecision> decisions;
    std::map<std::uint32_t, FrameOutcome> outcomes;  // every frame seen, exactly once
    std::size_t jump_count = 0;
};

// Renderer-side frame pairing. Frames are consumed in order; a frame whose
// second half is missing gets out_of_order_wait_ms from its first half's
// arrival and is then skipped. When the stream runs ahead of the renderer by
// max_lag_ms or more of stream time (frame-number gap at capture_fps) and a
// complete newer frame is buffered, the renderer abandons the backlog and
// jumps straight to the newest complete frame; everything passed over is
// superseded. A lag-triggered "jump" that would not pass over anything is an
// ordinary render.
//
// Boundary conventions: a skip fires at exactly first_arrival + wait (never
// earlier), or later if the frame was stuck behind an older head-of-line
// frame; a packet arriving exactly at the deadline loses to the skip. The
// lag rule triggers at >= max_lag_ms.
//
// The decision log contains render/skip/jump_to entries only; `wait` is the
// implicit state between decisions and exists for interactive callers.
class FrameSynchronizer {
public:
    explicit FrameSynchronizer(const SyncPolicy& policy) : policy_(policy) {}

    /// Feed packets in arrival order, then call finish().
    void on_packet(const StreamPacket& pkt) {
        if (pkt.arrival_time_ms < last_event_ms_)
            throw OrderingError("synchronize: packet for frame " +
                                std::to_string(pkt.frame_number) + " arrives at " +
                                std::to_string(pkt.arrival_time_ms) + " ms, before " +
                                std::to_string(last_event_ms_) + " ms");
        run_timers_until(pkt.arrival_time_ms);
        last_event_ms_ = pkt.arrival_time_ms;

        if (pkt.frame_number > highest_seen_ || !any_seen_) {
            highest_seen_ = std::max(highest_seen_, pkt.frame_number);
            any_seen_ = true;
        }

        if (run_.outcomes.count(pkt.frame_number)) return;  // already accounted; drop
        if (position_set_ && pkt.frame_number <= position_) {
            // First sight of a frame the renderer has already moved past: it
            // was passed over by a skip-forward, so account it as superseded.
            run_.outcomes[pkt.frame_number] = FrameOutcome::superseded;
            return;
        }

        Pending& p = pending_[pkt.frame_number];
        if (!p.touched) {
            p.first_arrival_ms = pkt.arrival_time_ms;
            p.touched = true;
        }
        if (pkt.channel == Channel::depth) p.have_depth = true;
        else p.have_color = true;

        resolve(pkt.arrival_time_ms);
    }

    /// Flush remaining per-frame timers after the last packet.
    SyncRun finish() {
        run_timers_until(std::numeric_limits<double>::infinity());
        return std::move(run_);
    }

private:
    struct Pending {
        bool have_depth = false;
        bool have_color = false;
        bool touched = false;
        double first_arrival_ms = 0.0;
    };

    static bool complete(const Pending& p) { return p.have_depth && p.have_color; }

    double ms_per_frame() const { return 1000.0 / policy_.capture_fps; }

    /// Fires due skip timers (in time order) strictly before `until_ms`,
    /// respecting that only the head-of-line frame's timer is live.
    void run_timers_until(double until_ms) {
        while (!pending_.empty()) {
            auto head = pending_.begin();
            if (complete(head->second)) break;  // resolve() handles it at event time
            const double deadline = head->second.first_arrival_ms + policy_.out_of_order_wait_ms;
            if (deadline > until_ms) break;
            emit(deadline, SyncAction::skip, head->first);
            pending_.erase(head);
            resolve(deadline);
        }
    }

    /// Renders / jumps everything that can be decided at time `now`.
    void resolve(double now) {
        while (!pending_.empty()) {
            // Lag rule first: it may bypass the head of the line entirely.
            if (position_set_ && any_seen_) {
                const double lag_ms =
                    (static_cast<double>(highest_seen_) - static_cast<double>(position_)) *
                    ms_per_frame();
                if (lag_ms >= policy_.max_lag_ms) {
                    std::uint32_t target = 0;
                    bool found = false;
                    for (const auto& [frame, p] : pending_)
                        if (complete(p)) {
                            target = frame;
                            found = true;
                        }
                    if (found && target > pending_.begin()->first) {
                        for (auto it = pending_.begin();
                             it != pending_.end() && it->first < target;) {
                            run_.outcomes[it->first] = FrameOutcome::superseded;
                            it = pending_.erase(it);
                        }
                        emit(now, SyncAction::jump_to, target);
                        ++run_.jump_count;
                        pending_.erase(target);
                        continue;
                    }
                }
            }

            auto head = pending_.begin();
            if (complete(head->second)) {
                emit(now, SyncAction::render, head->first);
                pending_.erase(head);
                continue;
            }
            const double deadline = head->second.first_arrival_ms + policy_.out_of_order_wait_ms;
            if (now >= deadline) {
                emit(now, SyncAction::skip, head->first);
                pending_.erase(head);
                continue;
            }
            break;  // head of line still inside its grace period
        }
    }

    void emit(double time_ms, SyncAction action, std::uint32_t frame) {
        run_.decisions.push_back({time_ms, action, frame});
        run_.outcomes[frame] = action == SyncAction::skip ? FrameOutcome::skipped
                                                          : FrameOutcome::rendered;
        position_ = frame;
        position_set_ = true;
    }

    SyncPolicy policy_;
    std::map<std::uint32_t, Pending> pending_;
    SyncRun run_;
    std::uint32_t position_ = 0;
    bool position_set_ = false;
    std::uint32_t highest_seen_ = 0;
    bool any_seen_ = false;
    double last_event_ms_ = -std::numeric_limits<double>::infinity();
};

/// Runs the synchronizer over a packet trace sorted by arrival time.
inline SyncRun synchronize_detailed(const std::vector<StreamPacket>& packets,
                                    const SyncPolicy& policy) {
    FrameSynchronizer sync(policy);
    for (const auto& pkt : packets) sync.on_packet(pkt);
    return sync.finish();
}

inline std::vector<RenderDecision> synchronize(const std::vector<StreamPacket>& packets,
                                               const SyncPolicy& policy) {
    return synchronize_detailed(packets, policy).decisions;
}

}  // namespace volcap

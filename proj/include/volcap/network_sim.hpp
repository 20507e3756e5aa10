#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "volcap/frame.hpp"
#include "volcap/rng.hpp"
#include "volcap/sync.hpp"

namespace volcap {

/// Delivery behavior of one channel. Latency is uniform in
/// latency_ms +- jitter_ms (clamped at 0); each packet is lost independently
/// with probability loss_rate.
struct ChannelModel {
    double latency_ms = 40.0;
    double jitter_ms = 0.0;
    double loss_rate = 0.0;
};

struct SyncStats {
    std::size_t frames_sent = 0;
    std::size_t packets_sent = 0;
    std::size_t packets_lost = 0;
    std::size_t rendered = 0;
    std::size_t skipped = 0;
    std::size_t superseded = 0;
    std::size_t jumps = 0;
    double mean_render_latency_ms = 0.0;  // render decision time minus send time
};

struct NetworkSimResult {
    std::vector<StreamPacket> packets;  // delivered, sorted by arrival
    std::vector<RenderDecision> decisions;
    SyncStats stats;
};

/// Frame metadata entering the network: number + send time in stream ms.
struct SendEntry {
    std::uint32_t frame_number = 0;
    double send_time_ms = 0.0;
    std::size_t payload_index = 0;
};

namespace detail {

inline double draw_latency(std::mt19937_64& rng, const ChannelModel& ch) {
    const double lat = ch.jitter_ms == 0.0
                           ? ch.latency_ms
                           : uniform(rng, ch.latency_ms - ch.jitter_ms, ch.latency_ms + ch.jitter_ms);
    return std::max(0.0, lat);
}

}  // namespace detail

/// Splits each sent frame into a depth and a color packet, draws per-channel
/// latency/loss with a deterministic seeded generator, sorts the survivors by
/// arrival time and feeds them through the synchronizer. Each channel gets an
/// independent RNG substream, so changing one channel's draws never shifts
/// the other's.
inline NetworkSimResult simulate_network(const std::vector<SendEntry>& sends,
                                         const ChannelModel& depth_channel,
                                         const ChannelModel& color_channel,
                                         const SyncPolicy& policy, std::uint64_t seed) {
    NetworkSimResult result;
    result.stats.frames_sent = sends.size();

    auto depth_rng = make_rng(seed, static_cast<std::uint64_t>(Channel::depth));
    auto color_rng = make_rng(seed, static_cast<std::uint64_t>(Channel::color));

    for (const SendEntry& s : sends) {
        for (Channel ch : {Channel::depth, Channel::color}) {
            auto& rng = ch == Channel::depth ? depth_rng : color_rng;
            const ChannelModel& model = ch == Channel::depth ? depth_channel : color_channel;
            ++result.stats.packets_sent;
            // Both draws happen whether or not the packet survives, so one
            // packet's fate never shifts the delays of those after it.
            const double lost_draw = uniform01(rng);
            const double latency = detail::draw_latency(rng, model);
            if (lost_draw < model.loss_rate) {
                ++result.stats.packets_lost;
                continue;
            }
            StreamPacket pkt;
            pkt.channel = ch;
            pkt.frame_number = s.frame_number;
            pkt.send_time_ms = s.send_time_ms;
            pkt.arrival_time_ms = s.send_time_ms + latency;
            pkt.payload_index = s.payload_index;
            result.packets.push_back(pkt);
        }
    }

    std::stable_sort(result.packets.begin(), result.packets.end(),
                     [](const StreamPacket& a, const StreamPacket& b) {
                         if (a.arrival_time_ms != b.arrival_time_ms)
                             return a.arrival_time_ms < b.arrival_time_ms;
                         if (a.frame_number != b.frame_number) return a.frame_number < b.frame_number;
                         return a.channel < b.channel;
                     });

    SyncRun run = synchronize_detailed(result.packets, policy);
    result.decisions = std::move(run.decisions);
    result.stats.jumps = run.jump_count;
    for (const auto& [frame, outcome] : run.outcomes) {
        switch (outcome) {
            case FrameOutcome::rendered: ++result.stats.rendered; break;
            case FrameOutcome::skipped: ++result.stats.skipped; break;
            case FrameOutcome::superseded: ++result.stats.superseded; break;
        }
    }

    double latency_sum = 0.0;
    std::size_t latency_count = 0;
    for (const RenderDecision& d : result.decisions) {
        if (d.action == SyncAction::skip) continue;
        for (const SendEntry& s : sends)
            if (s.frame_number == d.frame_number) {
                latency_sum += d.time_ms - s.send_time_ms;
                ++latency_count;
                break;
            }
    }
    result.stats.mean_render_latency_ms = latency_count ? latency_sum / latency_count : 0.0;

    return result;
}

/// Send schedule for a frame sequence: forwards every k-th frame where
/// k = round(capture_fps / delivery_fps), at the frame's own timestamp.
/// With the defaults (30 capture, 15 delivery) every second frame is sent.
inline std::vector<SendEntry> make_send_schedule(const std::vector<FramePair>& pairs,
                                                 const SyncPolicy& policy) {
    const int stride = std::max(1, static_cast<int>(std::lround(policy.capture_fps /
                                                                policy.delivery_fps)));
    std::vector<SendEntry> sends;
    for (std::size_t i = 0; i < pairs.size(); i += static_cast<std::size_t>(stride)) {
        SendEntry s;
        s.frame_number = pairs[i].frame_number();
        s.send_time_ms = static_cast<double>(pairs[i].timestamp_us()) / 1000.0;
        s.payload_index = i;
        sends.push_back(s);
    }
    return sends;
}

inline NetworkSimResult simulate_network(const std::vector<FramePair>& pairs,
                                         const ChannelModel& depth_channel,
                                         const ChannelModel& color_channel,
                                         const SyncPolicy& policy, std::uint64_t seed) {
    return simulate_network(make_send_schedule(pairs, policy), depth_channel, color_channel,
                            policy, seed);
}

}  // namespace volcap

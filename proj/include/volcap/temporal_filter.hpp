#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "volcap/error.hpp"
#include "volcap/frame.hpp"

namespace volcap {

/// Knobs for the three-stage depth filter chain.
struct FilterParams {
    double historic_window_ms = 200;  // how far back a hole may borrow a reading
    int small_n = 10;                 // frames in the small-jitter moving mean
    int small_tolerance_mm = 3;       // |current - mean| hold threshold
    int large_n2 = 60;                // frames (and fixed denominator) for flicker ratio
    int large_lambda_mm = 3;          // transition magnitude that counts as flicker
    double large_ratio = 0.6;         // flicker ratio above which the pixel holds

    int history_capacity() const { return std::max({60, small_n, large_n2}); }
};

/// Per-pixel depth history: a ring of the most recent RAW sensor frames plus
/// the frame the filter chain last emitted. Raw history feeds the moving mean
/// and the flicker transition counts; the emitted frame is what "previous
/// value" resolves to when a pixel holds, so a held pixel stays put instead
/// of replaying last frame's sensor noise one frame late.
class PixelHistory {
public:
    PixelHistory(int width, int height, int capacity)
        : width_(width), height_(height), capacity_(capacity) {
        if (capacity < 1) throw ValidationError("PixelHistory: capacity must be >= 1");
    }

    explicit PixelHistory(const FilterParams& params, int width = 320, int height = 288)
        : PixelHistory(width, height, params.history_capacity()) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return frames_.size(); }
    bool empty() const { return frames_.empty(); }

    /// Frames oldest..newest; index size()-1 is the previous frame.
    const DepthFrame& frame(std::size_t index) const { return frames_[index]; }

    void push(DepthFrame raw) {
        check_shape(raw, "PixelHistory::push");
        if (!frames_.empty()) {
            const DepthFrame& last = frames_.back();
            if (raw.frame_number <= last.frame_number)
                throw OrderingError("PixelHistory: frame " + std::to_string(raw.frame_number) +
                                    " pushed after frame " + std::to_string(last.frame_number));
            if (raw.timestamp_us < last.timestamp_us)
                throw OrderingError("PixelHistory: timestamp moved backwards at frame " +
                                    std::to_string(raw.frame_number));
        }
        frames_.push_back(std::move(raw));
        if (frames_.size() > static_cast<std::size_t>(capacity_)) frames_.pop_front();
    }

    /// The frame "previous value" reads from: the last emitted frame when the
    /// chain has produced one, otherwise the newest raw frame.
    const DepthFrame* previous_value_frame() const {
        if (emitted_) return &*emitted_;
        if (!frames_.empty()) return &frames_.back();
        return nullptr;
    }

    void set_emitted(DepthFrame f) {
        check_shape(f, "PixelHistory::set_emitted");
        emitted_ = std::move(f);
    }

    void check_shape(const DepthFrame& f, const std::string& where) const {
        if (f.width != width_ || f.height != height_)
            throw ShapeError(where + ": frame is " + std::to_string(f.width) + "x" +
                             std::to_string(f.height) + ", history is " + std::to_string(width_) +
                             "x" + std::to_string(height_));
    }

private:
    int width_, height_, capacity_;
    std::deque<DepthFrame> frames_;
    std::optional<DepthFrame> emitted_;
};

/// Fills invalid pixels with their most recent valid reading, provided that
/// reading is at most historic_window_ms old. Valid pixels pass through, so
/// this stage never invalidates anything.
inline DepthFrame historic_fill(const DepthFrame& current, const PixelHistory& history,
                                const FilterParams& params) {
    history.check_shape(current, "historic_fill");
    DepthFrame out = current;
    if (history.empty()) return out;

    const std::uint64_t window_us =
        static_cast<std::uint64_t>(params.historic_window_ms * 1000.0);
    const std::size_t n = out.data.size();
    // Newest first: once a pixel is filled, older readings cannot overwrite it.
    for (std::size_t k = history.size(); k-- > 0;) {
        const DepthFrame& h = history.frame(k);
        if (h.timestamp_us > current.timestamp_us)
            throw ValidationError("historic_fill: history frame " +
                                  std::to_string(h.frame_number) + " is newer than the current frame");
        if (current.timestamp_us - h.timestamp_us > window_us) break;
        std::uint16_t* od = out.data.data();
        const std::uint16_t* hd = h.data.data();
        // Copying an invalid reading over an invalid pixel is a no-op, so the
        // branch on the history value is dropped to keep the loop a select.
        for (std::size_t i = 0; i < n; ++i)
            if (od[i] == kInvalidDepth) od[i] = hd[i];
    }
    return out;
}

namespace detail {

/// Per-pixel sum and count of valid readings over the newest `n` history frames.
inline void valid_sums(const PixelHistory& history, int n, std::vector<std::uint32_t>& sum,
                       std::vector<std::uint16_t>& count) {
    const std::size_t px = sum.size();
    const std::size_t take = std::min<std::size_t>(n, history.size());
    std::uint32_t* s = sum.data();
    std::uint16_t* c = count.data();
    for (std::size_t k = history.size() - take; k < history.size(); ++k) {
        const std::uint16_t* hd = history.frame(k).data.data();
        for (std::size_t i = 0; i < px; ++i) {
            const std::uint16_t v = hd[i];
            const std::uint16_t valid = v != kInvalidDepth;
            s[i] += static_cast<std::uint32_t>(v) * valid;
            c[i] = static_cast<std::uint16_t>(c[i] + valid);
        }
    }
}

inline std::uint16_t previous_or(const DepthFrame* prev, std::size_t i, std::uint16_t fallback) {
    if (!prev) return fallback;
    const std::uint16_t v = prev->data[i];
    return v == kInvalidDepth ? fallback : v;
}

}  // namespace detail

/// Small-jitter hold: when a valid reading sits within small_tolerance_mm of
/// the moving mean of its valid history, the pixel keeps its previous value
/// instead of twitching. The comparison |current - mean| <= tol is done in
/// exact integer arithmetic (|count*current - sum| <= tol*count) so ties do
/// not depend on floating-point rounding. Pixels with no valid history pass
/// through.
inline DepthFrame small_jitter_hold(const DepthFrame& current, const PixelHistory& history,
                                    const FilterParams& params) {
    history.check_shape(current, "small_jitter_hold");
    DepthFrame out = current;
    if (history.empty()) return out;

    const std::size_t px = out.data.size();
    std::vector<std::uint32_t> sum(px, 0);
    std::vector<std::uint16_t> count(px, 0);
    detail::valid_sums(history, params.small_n, sum, count);

    const DepthFrame* prev = history.previous_value_frame();
    const std::int64_t tol = params.small_tolerance_mm;
    for (std::size_t i = 0; i < px; ++i) {
        const std::uint16_t cur = current.data[i];
        if (cur == kInvalidDepth || count[i] == 0) continue;
        const std::int64_t diff =
            static_cast<std::int64_t>(cur) * count[i] - static_cast<std::int64_t>(sum[i]);
        if (std::abs(diff) <= tol * count[i]) out.data[i] = detail::previous_or(prev, i, cur);
    }
    return out;
}

/// Large-jitter hold: counts valid-to-valid transitions larger than
/// large_lambda_mm across the newest large_n2 history frames; if that count
/// over the fixed denominator large_n2 exceeds large_ratio, the pixel is
/// flickering and keeps its previous value.
inline DepthFrame large_jitter_hold(const DepthFrame& current, const PixelHistory& history,
                                    const FilterParams& params) {
    history.check_shape(current, "large_jitter_hold");
    DepthFrame out = current;
    if (history.size() < 2) return out;

    const std::size_t px = out.data.size();
    std::vector<std::uint16_t> transitions(px, 0);
    const std::size_t take = std::min<std::size_t>(params.large_n2, history.size());
    const std::size_t first = history.size() - take;
    const int lambda = params.large_lambda_mm;
    std::uint16_t* tr = transitions.data();
    // Branch-free accumulation: this pass visits every pixel of up to
    // large_n2 frame pairs, which dominates the whole filter's runtime.
    for (std::size_t k = first + 1; k < history.size(); ++k) {
        const std::uint16_t* pa = history.frame(k - 1).data.data();
        const std::uint16_t* pb = history.frame(k).data.data();
        for (std::size_t i = 0; i < px; ++i) {
            const int av = pa[i];
            const int bv = pb[i];
            const int d = av - bv;
            const unsigned both = (av != kInvalidDepth) & (bv != kInvalidDepth);
            const unsigned big = (d > lambda) | (d < -lambda);
            tr[i] = static_cast<std::uint16_t>(tr[i] + (both & big));
        }
    }

    const DepthFrame* prev = history.previous_value_frame();
    for (std::size_t i = 0; i < px; ++i) {
        const double ratio = static_cast<double>(transitions[i]) / params.large_n2;
        if (ratio > params.large_ratio)
            out.data[i] = detail::previous_or(prev, i, current.data[i]);
    }
    return out;
}

/// The full chain: historic fill, then small-jitter hold, then large-jitter
/// hold. Afterwards the RAW current frame enters the history and the emitted
/// frame is remembered as the next frame's "previous value". Frame number and
/// timestamp pass through untouched.
inline DepthFrame filter_frame(const DepthFrame& current, PixelHistory& history,
                               const FilterParams& params) {
    DepthFrame out = historic_fill(current, history, params);
    out = small_jitter_hold(out, history, params);
    out = large_jitter_hold(out, history, params);
    history.push(current);
    history.set_emitted(out);
    return out;
}

}  // namespace volcap

#pragma once

// Brute-force scalar reference for the depth filter chain. Works pixel by
// pixel with plain loops and keeps its own copies of the raw history and the
// previously emitted frame; the library version is organized frame-major with
// shared per-pixel accumulators, so agreement is a real cross-check.
//
// Shared contract both sides pin down:
//   - history keeps the newest history_capacity() raw frames;
//   - the fill window test is (current_ts - old_ts) <= historic_window_ms,
//     inclusive;
//   - the small-jitter tie test |cur - mean| <= tol is evaluated exactly, as
//     |cur*count - sum| <= tol*count over integers;
//   - the flicker test is (double)transitions / large_n2 > large_ratio, with
//     the fixed denominator, in that exact floating-point phrasing;
//   - "previous value" means the pixel of the last *emitted* frame (newest
//     raw frame before anything was emitted), falling back to the incoming
//     value when that pixel is invalid.

#include <cstdint>
#include <optional>
#include <vector>

#include "volcap/frame.hpp"
#include "volcap/temporal_filter.hpp"

namespace oracle {

class ReferenceFilter {
public:
    explicit ReferenceFilter(const volcap::FilterParams& params) : p_(params) {}

    volcap::DepthFrame step(const volcap::DepthFrame& cur) {
        volcap::DepthFrame out = cur;
        for (std::size_t i = 0; i < cur.data.size(); ++i)
            out.data[i] = filter_pixel(cur, i);
        raws_.push_back(cur);
        while (raws_.size() > static_cast<std::size_t>(p_.history_capacity()))
            raws_.erase(raws_.begin());
        emitted_ = out;
        return out;
    }

private:
    std::uint16_t filter_pixel(const volcap::DepthFrame& cur, std::size_t i) const {
        std::uint16_t v = cur.data[i];

        // Stage 1: a hole borrows the newest valid reading inside the window.
        if (v == 0 && !raws_.empty()) {
            const std::uint64_t window_us =
                static_cast<std::uint64_t>(p_.historic_window_ms * 1000.0);
            for (std::size_t k = raws_.size(); k-- > 0;) {
                if (cur.timestamp_us - raws_[k].timestamp_us > window_us) break;
                if (raws_[k].data[i] != 0) {
                    v = raws_[k].data[i];
                    break;
                }
            }
        }

        const auto previous = [&](std::uint16_t fallback) -> std::uint16_t {
            std::uint16_t pv;
            if (emitted_) pv = emitted_->data[i];
            else if (!raws_.empty()) pv = raws_.back().data[i];
            else return fallback;
            return pv == 0 ? fallback : pv;
        };

        // Stage 2: hold when within tolerance of the valid-history mean.
        if (v != 0 && !raws_.empty()) {
            long long sum = 0, cnt = 0;
            std::size_t start =
                raws_.size() > static_cast<std::size_t>(p_.small_n)
                    ? raws_.size() - static_cast<std::size_t>(p_.small_n)
                    : 0;
            for (std::size_t k = start; k < raws_.size(); ++k) {
                if (raws_[k].data[i] != 0) {
                    sum += raws_[k].data[i];
                    ++cnt;
                }
            }
            if (cnt > 0) {
                long long lhs = static_cast<long long>(v) * cnt - sum;
                if (lhs < 0) lhs = -lhs;
                if (lhs <= static_cast<long long>(p_.small_tolerance_mm) * cnt) v = previous(v);
            }
        }

        // Stage 3: hold when the pixel's recent history flickers too much.
        if (raws_.size() >= 2) {
            std::size_t start =
                raws_.size() > static_cast<std::size_t>(p_.large_n2)
                    ? raws_.size() - static_cast<std::size_t>(p_.large_n2)
                    : 0;
            int transitions = 0;
            for (std::size_t k = start + 1; k < raws_.size(); ++k) {
                const std::uint16_t a = raws_[k - 1].data[i];
                const std::uint16_t b = raws_[k].data[i];
                if (a == 0 || b == 0) continue;
                int diff = static_cast<int>(a) - static_cast<int>(b);
                if (diff < 0) diff = -diff;
                if (diff > p_.large_lambda_mm) ++transitions;
            }
            if (static_cast<double>(transitions) / p_.large_n2 > p_.large_ratio) v = previous(v);
        }

        return v;
    }

    volcap::FilterParams p_;
    std::vector<volcap::DepthFrame> raws_;
    std::optional<volcap::DepthFrame> emitted_;
};

}  // namespace oracle

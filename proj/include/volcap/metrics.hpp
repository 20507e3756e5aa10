#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "volcap/error.hpp"
#include "volcap/frame.hpp"

namespace volcap {

namespace detail {

inline void check_same_shape(const DepthFrame& a, const DepthFrame& b, const std::string& where) {
    if (a.width != b.width || a.height != b.height)
        throw ShapeError(where + ": frames " + std::to_string(a.frame_number) + " and " +
                         std::to_string(b.frame_number) + " differ in resolution");
}

/// Sum of |depth difference| in meters over pixels valid in both frames.
inline double pair_jitter_m(const DepthFrame& a, const DepthFrame& b) {
    double sum_mm = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        if (a.data[i] == kInvalidDepth || b.data[i] == kInvalidDepth) continue;
        sum_mm += std::abs(static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]));
    }
    return sum_mm * 1e-3;
}

/// Count of pixels whose validity differs between the two frames.
inline std::size_t pair_toggles(const DepthFrame& a, const DepthFrame& b) {
    std::size_t toggles = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if ((a.data[i] == kInvalidDepth) != (b.data[i] == kInvalidDepth)) ++toggles;
    return toggles;
}

}  // namespace detail

/// Frame-to-frame depth instability: for each consecutive frame pair, the sum
/// of absolute depth changes (meters) over pixels valid in both; averaged
/// over all pairs. Needs at least 2 frames.
inline double jitter_metric(const std::vector<DepthFrame>& stream) {
    if (stream.size() < 2) throw ArityError("jitter_metric: need at least 2 frames");
    double total = 0.0;
    for (std::size_t k = 1; k < stream.size(); ++k) {
        detail::check_same_shape(stream[k - 1], stream[k], "jitter_metric");
        total += detail::pair_jitter_m(stream[k - 1], stream[k]);
    }
    return total / static_cast<double>(stream.size() - 1);
}

/// Mean number of validity toggles per consecutive frame pair.
inline double flicker_metric(const std::vector<DepthFrame>& stream) {
    if (stream.size() < 2) throw ArityError("flicker_metric: need at least 2 frames");
    double total = 0.0;
    for (std::size_t k = 1; k < stream.size(); ++k) {
        detail::check_same_shape(stream[k - 1], stream[k], "flicker_metric");
        total += static_cast<double>(detail::pair_toggles(stream[k - 1], stream[k]));
    }
    return total / static_cast<double>(stream.size() - 1);
}

/// Of all pixel readings invalid in the raw stream, the fraction the filtered
/// stream made valid. 0 when the raw stream has no invalid readings.
inline double recovered_vertex_ratio(const std::vector<DepthFrame>& raw,
                                     const std::vector<DepthFrame>& filtered) {
    if (raw.size() != filtered.size())
        throw ShapeError("recovered_vertex_ratio: raw stream has " + std::to_string(raw.size()) +
                         " frames, filtered " + std::to_string(filtered.size()));
    std::size_t invalid = 0;
    std::size_t recovered = 0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        detail::check_same_shape(raw[k], filtered[k], "recovered_vertex_ratio");
        for (std::size_t i = 0; i < raw[k].data.size(); ++i) {
            if (raw[k].data[i] != kInvalidDepth) continue;
            ++invalid;
            if (filtered[k].data[i] != kInvalidDepth) ++recovered;
        }
    }
    return invalid == 0 ? 0.0 : static_cast<double>(recovered) / static_cast<double>(invalid);
}

/// Streaming accumulators for the three metrics, for pipelines that do not
/// want to hold both full streams in memory.
class MetricsAccumulator {
public:
    void add(const DepthFrame& raw, const DepthFrame& filtered) {
        detail::check_same_shape(raw, filtered, "metrics");
        if (have_prev_) {
            raw_jitter_sum_ += detail::pair_jitter_m(prev_raw_, raw);
            filtered_jitter_sum_ += detail::pair_jitter_m(prev_filtered_, filtered);
            raw_toggles_ += detail::pair_toggles(prev_raw_, raw);
            filtered_toggles_ += detail::pair_toggles(prev_filtered_, filtered);
            ++pairs_;
        }
        for (std::size_t i = 0; i < raw.data.size(); ++i) {
            if (raw.data[i] != kInvalidDepth) continue;
            ++invalid_;
            if (filtered.data[i] != kInvalidDepth) ++recovered_;
        }
        prev_raw_ = raw;
        prev_filtered_ = filtered;
        have_prev_ = true;
        ++frames_;
    }

    std::size_t frames() const { return frames_; }
    double raw_jitter() const { return pairs_ ? raw_jitter_sum_ / pairs_ : 0.0; }
    double filtered_jitter() const { return pairs_ ? filtered_jitter_sum_ / pairs_ : 0.0; }
    double raw_flicker() const { return pairs_ ? static_cast<double>(raw_toggles_) / pairs_ : 0.0; }
    double filtered_flicker() const {
        return pairs_ ? static_cast<double>(filtered_toggles_) / pairs_ : 0.0;
    }
    double recovered_ratio() const {
        return invalid_ ? static_cast<double>(recovered_) / static_cast<double>(invalid_) : 0.0;
    }

private:
    DepthFrame prev_raw_, prev_filtered_;
    bool have_prev_ = false;
    double raw_jitter_sum_ = 0.0, filtered_jitter_sum_ = 0.0;
    std::size_t raw_toggles_ = 0, filtered_toggles_ = 0;
    std::size_t invalid_ = 0, recovered_ = 0;
    std::size_t pairs_ = 0, frames_ = 0;
};

}  // namespace volcap

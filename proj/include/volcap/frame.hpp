#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "volcap/error.hpp"

namespace volcap {

/// Depth value marking an invalid (dropped) sensor reading.
inline constexpr std::uint16_t kInvalidDepth = 0;

/// One depth image. Values are millimeters, row-major, 0 = invalid.
struct DepthFrame {
    std::uint32_t frame_number = 0;
    std::uint64_t timestamp_us = 0;
    std::uint16_t width = 320;
    std::uint16_t height = 288;
    std::vector<std::uint16_t> data;  // width * height entries

    DepthFrame() = default;
    DepthFrame(std::uint32_t frame, std::uint64_t ts_us, std::uint16_t w, std::uint16_t h)
        : frame_number(frame), timestamp_us(ts_us), width(w), height(h),
          data(static_cast<std::size_t>(w) * h, kInvalidDepth) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint16_t at(int row, int col) const {
        return data[static_cast<std::size_t>(row) * width + col];
    }
    std::uint16_t& at(int row, int col) {
        return data[static_cast<std::size_t>(row) * width + col];
    }

    void validate() const {
        if (data.size() != pixel_count())
            throw ValidationError("DepthFrame: data size " + std::to_string(data.size()) +
                                  " does not match " + std::to_string(width) + "x" +
                                  std::to_string(height));
    }
};

/// One color image, 8-bit RGB interleaved, row-major.
struct ColorFrame {
    std::uint32_t frame_number = 0;
    std::uint64_t timestamp_us = 0;
    std::uint16_t width = 1920;
    std::uint16_t height = 1080;
    std::vector<std::uint8_t> data;  // 3 * width * height entries

    ColorFrame() = default;
    ColorFrame(std::uint32_t frame, std::uint64_t ts_us, std::uint16_t w, std::uint16_t h)
        : frame_number(frame), timestamp_us(ts_us), width(w), height(h),
          data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    const std::uint8_t* rgb(int row, int col) const {
        return data.data() + (static_cast<std::size_t>(row) * width + col) * 3;
    }
    std::uint8_t* rgb(int row, int col) {
        return data.data() + (static_cast<std::size_t>(row) * width + col) * 3;
    }

    void validate() const {
        if (data.size() != pixel_count() * 3)
            throw ValidationError("ColorFrame: data size " + std::to_string(data.size()) +
                                  " does not match 3x" + std::to_string(width) + "x" +
                                  std::to_string(height));
    }
};

/// A depth frame and the color frame captured with it. The constructor is the
/// only way in, so a pair with mismatched frame numbers cannot exist.
class FramePair {
public:
    FramePair(DepthFrame depth, ColorFrame color)
        : depth_(std::move(depth)), color_(std::move(color)) {
        if (depth_.frame_number != color_.frame_number)
            throw PairingError("FramePair: depth frame " + std::to_string(depth_.frame_number) +
                               " paired with color frame " + std::to_string(color_.frame_number));
        depth_.validate();
        color_.validate();
    }

    const DepthFrame& depth() const { return depth_; }
    const ColorFrame& color() const { return color_; }
    std::uint32_t frame_number() const { return depth_.frame_number; }
    std::uint64_t timestamp_us() const { return depth_.timestamp_us; }

    /// Replaces the depth half; the replacement must keep the pair's frame number.
    void set_depth(DepthFrame d) {
        if (d.frame_number != color_.frame_number)
            throw PairingError("FramePair: replacement depth frame " +
                               std::to_string(d.frame_number) + " does not match color frame " +
                               std::to_string(color_.frame_number));
        d.validate();
        depth_ = std::move(d);
    }

private:
    DepthFrame depth_;
    ColorFrame color_;
};

}  // namespace volcap

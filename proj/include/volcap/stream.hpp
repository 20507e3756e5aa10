#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "volcap/error.hpp"
#include "volcap/frame.hpp"

namespace volcap {

// Capture stream container. Little-endian throughout:
//   magic "VMSH", version u16
//   per frame: one depth record immediately followed by one color record
//   record: type u8 (0 depth, 1 color), frame_number u32, timestamp_us u64,
//           width u16, height u16, payload (u16 millimeters / interleaved RGB8)
inline constexpr char kStreamMagic[4] = {'V', 'M', 'S', 'H'};
inline constexpr std::uint16_t kStreamVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    std::uint8_t bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bytes[i] = static_cast<std::uint8_t>(value >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
std::optional<T> get_le(std::istream& in) {
    std::uint8_t bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) return std::nullopt;
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        value |= static_cast<T>(bytes[i]) << (8 * i);
    return value;
}

inline void put_u16_block(std::ostream& out, const std::vector<std::uint16_t>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * 2));
    } else {
        for (std::uint16_t x : v) put_le(out, x);
    }
}

inline bool get_u16_block(std::istream& in, std::vector<std::uint16_t>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        return static_cast<bool>(
            in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 2)));
    } else {
        for (auto& x : v) {
            auto r = get_le<std::uint16_t>(in);
            if (!r) return false;
            x = *r;
        }
        return true;
    }
}

}  // namespace detail

enum class RecordType : std::uint8_t { depth = 0, color = 1 };

/// Appends frame pairs to an output stream in capture order.
class StreamWriter {
public:
    explicit StreamWriter(std::ostream& out) : out_(out) {
        out_.write(kStreamMagic, 4);
        detail::put_le(out_, kStreamVersion);
    }

    void append(const FramePair& pair) {
        if (have_last_ && pair.frame_number() <= last_frame_)
            throw OrderingError("stream write: frame " + std::to_string(pair.frame_number()) +
                                " after frame " + std::to_string(last_frame_) +
                                "; frame numbers must be strictly increasing");
        write_record(RecordType::depth, pair.depth());
        write_record(RecordType::color, pair.color());
        last_frame_ = pair.frame_number();
        have_last_ = true;
        if (!out_) throw IoError("stream write failed");
    }

private:
    void write_record(RecordType type, const DepthFrame& f) {
        detail::put_le(out_, static_cast<std::uint8_t>(type));
        detail::put_le(out_, f.frame_number);
        detail::put_le(out_, f.timestamp_us);
        detail::put_le(out_, f.width);
        detail::put_le(out_, f.height);
        detail::put_u16_block(out_, f.data);
    }
    void write_record(RecordType type, const ColorFrame& f) {
        detail::put_le(out_, static_cast<std::uint8_t>(type));
        detail::put_le(out_, f.frame_number);
        detail::put_le(out_, f.timestamp_us);
        detail::put_le(out_, f.width);
        detail::put_le(out_, f.height);
        out_.write(reinterpret_cast<const char*>(f.data.data()),
                   static_cast<std::streamsize>(f.data.size()));
    }

    std::ostream& out_;
    std::uint32_t last_frame_ = 0;
    bool have_last_ = false;
};

/// Reads frame pairs back in file order, validating structure as it goes.
class StreamReader {
public:
    explicit StreamReader(std::istream& in) : in_(in) {
        char magic[4];
        if (!in_.read(magic, 4))
            throw TruncationError("stream: shorter than the 4-byte magic", offset());
        if (std::memcmp(magic, kStreamMagic, 4) != 0)
            throw FormatError("stream: bad magic, not a capture stream");
        auto version = detail::get_le<std::uint16_t>(in_);
        if (!version) throw TruncationError("stream: truncated before version field", offset());
        if (*version != kStreamVersion)
            throw FormatError("stream: unsupported version " + std::to_string(*version) +
                              " (expected " + std::to_string(kStreamVersion) + ")");
    }

    /// Next pair, or nullopt at a clean end of stream.
    std::optional<FramePair> next() {
        in_.peek();
        if (in_.eof()) return std::nullopt;

        DepthFrame depth = read_depth_record();
        ColorFrame color = read_color_record(depth.frame_number);
        if (have_last_ && depth.frame_number <= last_frame_)
            throw OrderingError("stream: frame " + std::to_string(depth.frame_number) +
                                " after frame " + std::to_string(last_frame_) +
                                "; frame numbers must be strictly increasing");
        last_frame_ = depth.frame_number;
        have_last_ = true;
        return FramePair(std::move(depth), std::move(color));
    }

private:
    struct RecordHead {
        RecordType type;
        std::uint32_t frame;
        std::uint64_t ts;
        std::uint16_t w, h;
    };

    RecordHead read_head() {
        auto type = detail::get_le<std::uint8_t>(in_);
        if (!type) throw TruncationError("stream: truncated at record type", offset());
        if (*type > 1)
            throw FormatError("stream: unknown record type " + std::to_string(*type));
        auto frame = detail::get_le<std::uint32_t>(in_);
        auto ts = detail::get_le<std::uint64_t>(in_);
        auto w = detail::get_le<std::uint16_t>(in_);
        auto h = detail::get_le<std::uint16_t>(in_);
        if (!frame || !ts || !w || !h)
            throw TruncationError("stream: truncated inside record header", offset());
        return {static_cast<RecordType>(*type), *frame, *ts, *w, *h};
    }

    DepthFrame read_depth_record() {
        RecordHead head = read_head();
        if (head.type != RecordType::depth)
            throw PairingError("stream: expected depth record, found color (frame " +
                               std::to_string(head.frame) + ")");
        DepthFrame f(head.frame, head.ts, head.w, head.h);
        if (!detail::get_u16_block(in_, f.data))
            throw TruncationError(
                "stream: truncated depth payload at frame " + std::to_string(head.frame),
                offset());
        return f;
    }

    ColorFrame read_color_record(std::uint32_t expected_frame) {
        in_.peek();
        if (in_.eof())
            throw PairingError("stream: depth record for frame " + std::to_string(expected_frame) +
                               " has no color record");
        RecordHead head = read_head();
        if (head.type != RecordType::color)
            throw PairingError("stream: depth record at frame " + std::to_string(expected_frame) +
                               " followed by another depth record");
        if (head.frame != expected_frame)
            throw PairingError("stream: depth record for frame " + std::to_string(expected_frame) +
                               " followed by color record for frame " + std::to_string(head.frame));
        ColorFrame f(head.frame, head.ts, head.w, head.h);
        if (!in_.read(reinterpret_cast<char*>(f.data.data()),
                      static_cast<std::streamsize>(f.data.size())))
            throw TruncationError(
                "stream: truncated color payload at frame " + std::to_string(head.frame),
                offset());
        return f;
    }

    std::size_t offset() {
        in_.clear();
        auto pos = in_.tellg();
        return pos < 0 ? 0 : static_cast<std::size_t>(pos);
    }

    std::istream& in_;
    std::uint32_t last_frame_ = 0;
    bool have_last_ = false;
};

inline void write_stream(const std::vector<FramePair>& pairs, std::ostream& out) {
    StreamWriter w(out);
    for (const auto& p : pairs) w.append(p);
}

inline void write_stream(const std::vector<FramePair>& pairs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_stream(pairs, out);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

inline std::vector<FramePair> read_stream(std::istream& in) {
    StreamReader r(in);
    std::vector<FramePair> pairs;
    while (auto p = r.next()) pairs.push_back(std::move(*p));
    return pairs;
}

inline std::vector<FramePair> read_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    return read_stream(in);
}

}  // namespace volcap

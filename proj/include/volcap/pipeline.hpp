#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "volcap/camera.hpp"
#include "volcap/error.hpp"
#include "volcap/frame.hpp"
#include "volcap/mesh.hpp"
#include "volcap/metrics.hpp"
#include "volcap/network_sim.hpp"
#include "volcap/ply.hpp"
#include "volcap/stream.hpp"
#include "volcap/synth.hpp"
#include "volcap/temporal_filter.hpp"

namespace volcap {

/// A stage failure, annotated with where in the pipeline it happened. Keeps
/// the underlying error's exit code.
class StageError : public Error {
public:
    StageError(const std::string& stage, std::uint32_t frame, const Error& cause)
        : Error("stage " + stage + ", frame " + std::to_string(frame) + ": " + cause.what()),
          code_(cause.exit_code()) {}
    int exit_code() const noexcept override { return code_; }

private:
    int code_;
};

/// Single-producer single-consumer queue with a hard capacity; push blocks
/// while full, pop blocks while empty and returns nullopt once the queue is
/// closed and drained.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw ValidationError("BoundedQueue: capacity must be >= 1");
    }

    void push(T item) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
        if (closed_) throw ValidationError("BoundedQueue: push after close");
        items_.push_back(std::move(item));
        not_empty_.notify_one();
    }

    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable not_full_, not_empty_;
    std::deque<T> items_;
    std::size_t capacity_;
    bool closed_ = false;
};

struct PipelineConfig {
    std::string camera_path;
    std::optional<SceneSpec> scene;  // exactly one of scene / input_path
    std::string input_path;
    std::string out_dir = "out";
    std::size_t queue_capacity = 4;

    bool filter_enabled = true;
    FilterParams filter;

    bool sync_enabled = true;
    SyncPolicy sync;
    ChannelModel depth_channel;
    ChannelModel color_channel;
    std::uint64_t network_seed = 0;

    bool mesh_enabled = true;
    bool export_meshes = true;

    void validate() const {
        if (camera_path.empty()) throw ValidationError("pipeline config: camera path not set");
        if (!std::filesystem::exists(camera_path))
            throw IoError("pipeline config: camera file does not exist: " + camera_path);
        const bool have_scene = scene.has_value();
        const bool have_input = !input_path.empty();
        if (have_scene == have_input)
            throw ValidationError("pipeline config: set exactly one of \"scene\" and \"input\"");
        if (have_input && !std::filesystem::exists(input_path))
            throw IoError("pipeline config: input stream does not exist: " + input_path);
        if (out_dir.empty()) throw ValidationError("pipeline config: out_dir not set");
    }
};

namespace detail {

inline ChannelModel parse_channel(const nlohmann::json& j, const ChannelModel& defaults) {
    ChannelModel ch = defaults;
    ch.latency_ms = j.value("latency_ms", ch.latency_ms);
    ch.jitter_ms = j.value("jitter_ms", ch.jitter_ms);
    ch.loss_rate = j.value("loss_rate", ch.loss_rate);
    return ch;
}

}  // namespace detail

inline PipelineConfig parse_pipeline_config(const nlohmann::json& j) {
    PipelineConfig c;
    c.camera_path = j.value("camera", "");
    if (j.contains("scene")) c.scene = parse_scene_spec(j.at("scene"));
    c.input_path = j.value("input", "");
    c.out_dir = j.value("out_dir", c.out_dir);
    c.queue_capacity = j.value("queue_capacity", c.queue_capacity);

    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        c.filter_enabled = f.value("enabled", true);
        c.filter.historic_window_ms = f.value("historic_ms", c.filter.historic_window_ms);
        c.filter.small_n = f.value("small_n", c.filter.small_n);
        c.filter.small_tolerance_mm = f.value("small_mm", c.filter.small_tolerance_mm);
        c.filter.large_n2 = f.value("large_n2", c.filter.large_n2);
        c.filter.large_lambda_mm = f.value("large_lambda_mm", c.filter.large_lambda_mm);
        c.filter.large_ratio = f.value("large_ratio", c.filter.large_ratio);
    }
    if (j.contains("sync")) {
        const auto& s = j.at("sync");
        c.sync_enabled = s.value("enabled", true);
        c.sync.out_of_order_wait_ms = s.value("wait_ms", c.sync.out_of_order_wait_ms);
        c.sync.max_lag_ms = s.value("max_lag_ms", c.sync.max_lag_ms);
        c.sync.delivery_fps = s.value("delivery_fps", c.sync.delivery_fps);
        c.sync.capture_fps = s.value("capture_fps", c.sync.capture_fps);
        c.network_seed = s.value("seed", c.network_seed);
    }
    if (j.contains("channels")) {
        const auto& ch = j.at("channels");
        if (ch.contains("depth")) c.depth_channel = detail::parse_channel(ch.at("depth"), c.depth_channel);
        if (ch.contains("color")) c.color_channel = detail::parse_channel(ch.at("color"), c.color_channel);
    }
    if (j.contains("mesh")) {
        c.mesh_enabled = j.at("mesh").value("enabled", true);
        c.export_meshes = j.at("mesh").value("export_ply", true);
    }
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pipeline config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("pipeline config " + path + ": " + e.what());
    }
    return parse_pipeline_config(j);
}

namespace detail {

/// Nearest-rank percentile (q in [0, 1]) of an unsorted sample.
inline double percentile_ms(std::vector<double> samples, double q) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const auto idx = static_cast<std::size_t>(
        std::lround(q * static_cast<double>(samples.size() - 1)));
    return samples[idx];
}

inline nlohmann::json timing_summary(const std::vector<double>& samples) {
    nlohmann::json j;
    j["samples"] = samples.size();
    j["median_ms"] = percentile_ms(samples, 0.5);
    j["p95_ms"] = percentile_ms(samples, 0.95);
    if (!samples.empty()) {
        j["min_ms"] = *std::min_element(samples.begin(), samples.end());
        j["max_ms"] = *std::max_element(samples.begin(), samples.end());
    }
    return j;
}

/// One frame pair serialized as a self-contained stream; the explicit
/// producer/consumer boundary moves bytes, not live objects.
inline std::string serialize_pair(const FramePair& pair) {
    std::ostringstream out(std::ios::binary);
    StreamWriter w(out);
    w.append(pair);
    return std::move(out).str();
}

inline FramePair deserialize_pair(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    StreamReader r(in);
    auto pair = r.next();
    if (!pair) throw FormatError("pipeline seam: empty serialized frame");
    return std::move(*pair);
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace detail

struct PipelineResult {
    nlohmann::json metrics;
    std::string metrics_path;
    std::string decisions_path;  // empty when the sync stage is disabled
    std::vector<std::string> mesh_paths;
};

inline void write_decisions_csv(const std::vector<RenderDecision>& decisions,
                                const std::string& path) {
    std::ofstream csv(path);
    if (!csv) throw IoError("cannot open for writing: " + path);
    csv << "time_ms,action,frame_number\n";
    char row[96];
    for (const RenderDecision& d : decisions) {
        std::snprintf(row, sizeof(row), "%.10g,%s,%u\n", d.time_ms, to_string(d.action),
                      d.frame_number);
        csv << row;
    }
}

/// Runs synth/read -> temporal filter -> network/sync simulation -> mesh ->
/// export. The source+filter stage runs on its own thread and hands each
/// frame across a bounded queue (serialized bytes, capacity
/// config.queue_capacity) to the consumer, which collects frames, simulates
/// delivery, meshes exactly the frames the synchronizer rendered, and writes
/// frame_NNNNNN.ply, decisions.csv and metrics.json into config.out_dir.
/// Everything except the "timing" block of metrics.json is byte-deterministic
/// for a fixed config.
inline PipelineResult run_pipeline(const PipelineConfig& config) {
    config.validate();
    const CameraModel model = load_camera_model(config.camera_path);
    std::filesystem::create_directories(config.out_dir);

    BoundedQueue<std::string> queue(config.queue_capacity);
    MetricsAccumulator metrics;
    std::vector<double> filter_ms;
    std::exception_ptr producer_error;

    std::thread producer([&] {
        try {
            std::optional<PixelHistory> history;
            std::optional<std::ifstream> file;
            std::optional<StreamReader> reader;
            if (!config.input_path.empty()) {
                file.emplace(config.input_path, std::ios::binary);
                if (!*file) throw IoError("cannot open: " + config.input_path);
                reader.emplace(*file);
            }
            int index = 0;
            while (true) {
                std::optional<FramePair> pair;
                if (reader) {
                    pair = reader->next();
                } else if (index < config.scene->frames) {
                    pair = generate_frame(*config.scene, model, index);
                }
                if (!pair) break;
                const std::uint32_t frame_no = pair->frame_number();
                try {
                    DepthFrame filtered = pair->depth();
                    if (config.filter_enabled) {
                        if (!history)
                            history.emplace(config.filter, pair->depth().width,
                                            pair->depth().height);
                        const auto t0 = std::chrono::steady_clock::now();
                        filtered = filter_frame(pair->depth(), *history, config.filter);
                        filter_ms.push_back(detail::elapsed_ms(t0));
                    }
                    metrics.add(pair->depth(), filtered);
                    pair->set_depth(std::move(filtered));
                } catch (const Error& e) {
                    throw StageError("filter", frame_no, e);
                }
                queue.push(detail::serialize_pair(*pair));
                ++index;
            }
        } catch (...) {
            producer_error = std::current_exception();
        }
        queue.close();
    });

    std::vector<FramePair> collected;
    while (auto bytes = queue.pop()) collected.push_back(detail::deserialize_pair(*bytes));
    producer.join();
    if (producer_error) std::rethrow_exception(producer_error);

    PipelineResult result;
    nlohmann::json& out = result.metrics;
    out["frames"] = metrics.frames();
    out["jitter"] = {{"raw", metrics.raw_jitter()},
                     {"filtered", metrics.filtered_jitter()},
                     {"reduction", metrics.raw_jitter() > 0.0
                                       ? 1.0 - metrics.filtered_jitter() / metrics.raw_jitter()
                                       : 0.0}};
    out["flicker"] = {{"raw", metrics.raw_flicker()},
                      {"filtered", metrics.filtered_flicker()},
                      {"reduction", metrics.raw_flicker() > 0.0
                                        ? 1.0 - metrics.filtered_flicker() / metrics.raw_flicker()
                                        : 0.0}};
    out["recovered_vertex_ratio"] = metrics.recovered_ratio();

    // Which frames reach the renderer.
    std::vector<std::size_t> to_mesh;  // indices into `collected`
    if (config.sync_enabled) {
        const auto sends = make_send_schedule(collected, config.sync);
        NetworkSimResult net;
        try {
            net = simulate_network(sends, config.depth_channel, config.color_channel, config.sync,
                                   config.network_seed);
        } catch (const Error& e) {
            throw StageError("sync", 0, e);
        }
        std::map<std::uint32_t, std::size_t> frame_to_index;
        for (const SendEntry& s : sends) frame_to_index[s.frame_number] = s.payload_index;
        for (const RenderDecision& d : net.decisions)
            if (d.action != SyncAction::skip) to_mesh.push_back(frame_to_index.at(d.frame_number));

        result.decisions_path = (std::filesystem::path(config.out_dir) / "decisions.csv").string();
        write_decisions_csv(net.decisions, result.decisions_path);
        out["sync"] = {{"frames_sent", net.stats.frames_sent},
                       {"packets_sent", net.stats.packets_sent},
                       {"packets_lost", net.stats.packets_lost},
                       {"rendered", net.stats.rendered},
                       {"skipped", net.stats.skipped},
                       {"superseded", net.stats.superseded},
                       {"jumps", net.stats.jumps},
                       {"mean_render_latency_ms", net.stats.mean_render_latency_ms}};
    } else {
        for (std::size_t i = 0; i < collected.size(); ++i) to_mesh.push_back(i);
    }

    std::vector<double> mesh_ms;
    std::size_t triangles_total = 0;
    if (config.mesh_enabled && !collected.empty()) {
        const DepthFrame& first = collected.front().depth();
        const ProjectionTable table(first.height, first.width, model);
        for (std::size_t idx : to_mesh) {
            const FramePair& pair = collected[idx];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const GridMesh mesh = build_enhanced_mesh(pair, table);
                mesh_ms.push_back(detail::elapsed_ms(t0));
                triangles_total += mesh.triangles.size();
                if (config.export_meshes) {
                    char name[32];
                    std::snprintf(name, sizeof(name), "frame_%06u.ply", pair.frame_number());
                    const std::string path =
                        (std::filesystem::path(config.out_dir) / name).string();
                    export_ply(mesh, path);
                    result.mesh_paths.push_back(path);
                }
            } catch (const Error& e) {
                throw StageError("mesh", pair.frame_number(), e);
            }
        }
        out["meshes"] = {{"built", to_mesh.size()}, {"triangles_total", triangles_total}};
    }

    out["timing"] = {{"filter", detail::timing_summary(filter_ms)},
                     {"mesh", detail::timing_summary(mesh_ms)}};

    result.metrics_path = (std::filesystem::path(config.out_dir) / "metrics.json").string();
    std::ofstream mj(result.metrics_path);
    if (!mj) throw IoError("cannot open for writing: " + result.metrics_path);
    mj << out.dump(2) << "\n";

    return result;
}

/// FNV-1a, for cheap deterministic content hashes in bench reports.
inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Times the filter and mesh stages frame by frame over a synthetic scene and
/// reports medians/p95s plus a chained hash of every produced mesh, so two
/// runs on the same machine can be compared for both speed and identical
/// output. Reports below 10 samples are flagged low-confidence.
inline nlohmann::json run_bench(const CameraModel& model, const SceneSpec& scene) {
    PixelHistory history(FilterParams{}, scene.depth_width, scene.depth_height);
    const FilterParams params;
    const ProjectionTable table(scene.depth_height, scene.depth_width, model);

    std::vector<double> filter_ms, mesh_ms;
    std::uint64_t mesh_hash = 0xCBF29CE484222325ULL;
    for (int i = 0; i < scene.frames; ++i) {
        FramePair pair = generate_frame(scene, model, i);

        auto t0 = std::chrono::steady_clock::now();
        DepthFrame filtered = filter_frame(pair.depth(), history, params);
        filter_ms.push_back(detail::elapsed_ms(t0));
        pair.set_depth(std::move(filtered));

        t0 = std::chrono::steady_clock::now();
        const GridMesh mesh = build_enhanced_mesh(pair, table);
        mesh_ms.push_back(detail::elapsed_ms(t0));

        std::ostringstream ply(std::ios::binary);
        export_ply(mesh, ply);
        mesh_hash = fnv1a(std::move(ply).str(), mesh_hash);
    }

    nlohmann::json j;
    j["frames"] = scene.frames;
    j["low_confidence"] = scene.frames < 10;
    j["filter"] = detail::timing_summary(filter_ms);
    j["mesh"] = detail::timing_summary(mesh_ms);
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(mesh_hash));
    j["mesh_hash"] = hash;

    std::string cpu = "unknown";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) cpu = line.substr(colon + 2);
            break;
        }
    }
    j["machine"] = {{"cpu", cpu},
                    {"hardware_threads", std::thread::hardware_concurrency()},
                    {"compiler", __VERSION__},
#ifdef NDEBUG
                    {"build", "release"}};
#else
                    {"build", "debug"}};
#endif
    return j;
}

}  // namespace volcap

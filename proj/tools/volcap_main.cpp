// volcap command line front end.
//
// Exit codes: 0 success, 1 unexpected error, 2 usage or missing input,
// 3 malformed input data, 4 validation or numerical failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "volcap/camera.hpp"
#include "volcap/correspondence.hpp"
#include "volcap/error.hpp"
#include "volcap/mesh.hpp"
#include "volcap/network_sim.hpp"
#include "volcap/pipeline.hpp"
#include "volcap/ply.hpp"
#include "volcap/rigid_fit.hpp"
#include "volcap/stream.hpp"
#include "volcap/synth.hpp"
#include "volcap/temporal_filter.hpp"

namespace {

struct SynthOpts {
    std::string scene_path, camera_path, out_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> frames;
};

void run_synth(const SynthOpts& o) {
    volcap::SceneSpec spec = volcap::load_scene_spec(o.scene_path);
    if (o.seed) spec.seed = *o.seed;
    if (o.frames) spec.frames = *o.frames;
    const volcap::CameraModel model = volcap::load_camera_model(o.camera_path);
    const auto pairs = volcap::generate_scene(spec, model);
    volcap::write_stream(pairs, o.out_path);
    std::printf("wrote %zu frame pairs to %s\n", pairs.size(), o.out_path.c_str());
}

struct FilterOpts {
    std::string in_path, out_path;
    volcap::FilterParams params;
};

void run_filter(const FilterOpts& o) {
    std::ifstream in(o.in_path, std::ios::binary);
    if (!in) throw volcap::IoError("cannot open: " + o.in_path);
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw volcap::IoError("cannot open for writing: " + o.out_path);

    volcap::StreamReader reader(in);
    volcap::StreamWriter writer(out);
    std::optional<volcap::PixelHistory> history;
    std::size_t count = 0;
    while (auto pair = reader.next()) {
        if (!history)
            history.emplace(o.params, pair->depth().width, pair->depth().height);
        pair->set_depth(volcap::filter_frame(pair->depth(), *history, o.params));
        writer.append(*pair);
        ++count;
    }
    std::printf("filtered %zu frame pairs into %s\n", count, o.out_path.c_str());
}

struct SyncOpts {
    std::string in_path, out_path;
    volcap::SyncPolicy policy;
    volcap::ChannelModel depth_ch, color_ch;
    std::uint64_t seed = 0;
};

void run_sync(const SyncOpts& o) {
    const auto pairs = volcap::read_stream(o.in_path);
    const auto result =
        volcap::simulate_network(pairs, o.depth_ch, o.color_ch, o.policy, o.seed);
    if (!o.out_path.empty()) volcap::write_decisions_csv(result.decisions, o.out_path);

    const volcap::SyncStats& s = result.stats;
    nlohmann::json j{{"frames_sent", s.frames_sent},
                     {"packets_sent", s.packets_sent},
                     {"packets_lost", s.packets_lost},
                     {"rendered", s.rendered},
                     {"skipped", s.skipped},
                     {"superseded", s.superseded},
                     {"jumps", s.jumps},
                     {"mean_render_latency_ms", s.mean_render_latency_ms}};
    std::cout << j.dump(2) << "\n";
}

struct MeshOpts {
    std::string in_path, camera_path, out_dir;
};

void run_mesh(const MeshOpts& o) {
    const volcap::CameraModel model = volcap::load_camera_model(o.camera_path);
    std::ifstream in(o.in_path, std::ios::binary);
    if (!in) throw volcap::IoError("cannot open: " + o.in_path);
    std::filesystem::create_directories(o.out_dir);

    volcap::StreamReader reader(in);
    std::optional<volcap::ProjectionTable> table;
    std::size_t count = 0, triangles = 0;
    while (auto pair = reader.next()) {
        if (!table)
            table.emplace(pair->depth().height, pair->depth().width, model);
        const volcap::GridMesh mesh = volcap::build_enhanced_mesh(*pair, *table);
        triangles += mesh.triangles.size();
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06u.ply", pair->frame_number());
        volcap::export_ply(mesh, (std::filesystem::path(o.out_dir) / name).string());
        ++count;
    }
    std::printf("meshed %zu frames (%zu triangles) into %s\n", count, triangles,
                o.out_dir.c_str());
}

struct AlignOpts {
    std::string points_path, out_path;
};

void run_align(const AlignOpts& o) {
    const volcap::CorrespondenceSet corr = volcap::load_correspondences(o.points_path);
    const volcap::RigidTransform t = volcap::fit_rigid(corr);

    std::vector<Eigen::Vector3d> mapped;
    mapped.reserve(corr.a.size());
    for (const auto& p : corr.a) mapped.push_back(t.apply(p));
    const volcap::AlignmentStats stats = volcap::evaluate_alignment(corr.b, mapped);
    double max_err = 0.0;
    for (double e : stats.per_point_error_m) max_err = std::max(max_err, e);

    nlohmann::json j;
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot[3 * r + c] = t.rotation()(r, c);
    j["rotation"] = rot;
    j["translation_m"] = {t.translation().x(), t.translation().y(), t.translation().z()};
    j["points"] = corr.a.size();
    j["mean_error_m"] = stats.mean_error_m;
    j["stddev_error_m"] = stats.stddev_error_m;
    j["max_error_m"] = max_err;
    const std::string text = j.dump(2);
    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path);
        if (!out) throw volcap::IoError("cannot open for writing: " + o.out_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
}

struct PipelineOpts {
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
};

void run_pipeline_cmd(const PipelineOpts& o) {
    volcap::PipelineConfig config = volcap::load_pipeline_config(o.config_path);
    if (!o.out_dir.empty()) config.out_dir = o.out_dir;
    if (o.seed) config.network_seed = *o.seed;
    const volcap::PipelineResult result = volcap::run_pipeline(config);
    std::printf("pipeline done: %zu meshes, metrics at %s\n", result.mesh_paths.size(),
                result.metrics_path.c_str());
}

struct BenchOpts {
    std::string camera_path, out_path;
    int frames = 120;
    std::uint64_t seed = 42;
    std::string geometry = "sphere_on_plane";
};

void run_bench_cmd(const BenchOpts& o) {
    const volcap::CameraModel model = volcap::load_camera_model(o.camera_path);
    volcap::SceneSpec scene;
    scene.geometry = volcap::scene_geometry_from_string(o.geometry);
    scene.frames = o.frames;
    scene.seed = o.seed;
    scene.noise.gaussian_sigma_mm = 2.0;
    scene.noise.dropout_rate = 0.02;
    const nlohmann::json report = volcap::run_bench(model, scene);
    const std::string text = report.dump(2);
    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path);
        if (!out) throw volcap::IoError("cannot open for writing: " + o.out_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volumetric capture reconstruction toolkit"};
    app.require_subcommand(1);

    SynthOpts synth;
    auto* synth_cmd = app.add_subcommand("synth", "render a synthetic scene to a frame stream");
    synth_cmd->add_option("--scene", synth.scene_path, "scene JSON")->required();
    synth_cmd->add_option("--camera", synth.camera_path, "camera model JSON")->required();
    synth_cmd->add_option("--out", synth.out_path, "output stream file")->required();
    synth_cmd->add_option("--seed", synth.seed, "override the scene seed");
    synth_cmd->add_option("--frames", synth.frames, "override the frame count");

    FilterOpts filter;
    auto* filter_cmd = app.add_subcommand("filter", "temporally filter the depth channel");
    filter_cmd->add_option("--in", filter.in_path, "input stream file")->required();
    filter_cmd->add_option("--out", filter.out_path, "output stream file")->required();
    filter_cmd->add_option("--historic-ms", filter.params.historic_window_ms,
                           "fill window for recently valid pixels");
    filter_cmd->add_option("--small-n", filter.params.small_n, "small jitter averaging depth");
    filter_cmd->add_option("--small-mm", filter.params.small_tolerance_mm,
                           "small jitter tolerance");
    filter_cmd->add_option("--large-n2", filter.params.large_n2, "large jitter window");
    filter_cmd->add_option("--large-lambda-mm", filter.params.large_lambda_mm,
                           "large jitter transition threshold");
    filter_cmd->add_option("--large-ratio", filter.params.large_ratio,
                           "large jitter transition ratio");

    SyncOpts sync;
    auto* sync_cmd =
        app.add_subcommand("sync", "simulate two-channel delivery and renderer pairing");
    sync_cmd->add_option("--in", sync.in_path, "input stream file")->required();
    sync_cmd->add_option("--out", sync.out_path, "decision log CSV");
    sync_cmd->add_option("--seed", sync.seed, "network randomness seed");
    sync_cmd->add_option("--wait-ms", sync.policy.out_of_order_wait_ms,
                         "patience for an incomplete frame");
    sync_cmd->add_option("--max-lag-ms", sync.policy.max_lag_ms,
                         "stream-time backlog that triggers a jump");
    sync_cmd->add_option("--delivery-fps", sync.policy.delivery_fps, "send rate");
    sync_cmd->add_option("--capture-fps", sync.policy.capture_fps, "capture rate");
    sync_cmd->add_option("--depth-latency-ms", sync.depth_ch.latency_ms, "depth channel latency");
    sync_cmd->add_option("--depth-jitter-ms", sync.depth_ch.jitter_ms, "depth channel jitter");
    sync_cmd->add_option("--depth-loss", sync.depth_ch.loss_rate, "depth channel loss rate");
    sync_cmd->add_option("--color-latency-ms", sync.color_ch.latency_ms, "color channel latency");
    sync_cmd->add_option("--color-jitter-ms", sync.color_ch.jitter_ms, "color channel jitter");
    sync_cmd->add_option("--color-loss", sync.color_ch.loss_rate, "color channel loss rate");

    MeshOpts mesh;
    auto* mesh_cmd = app.add_subcommand("mesh", "triangulate frames and export PLY meshes");
    mesh_cmd->add_option("--in", mesh.in_path, "input stream file")->required();
    mesh_cmd->add_option("--camera", mesh.camera_path, "camera model JSON")->required();
    mesh_cmd->add_option("--out-dir", mesh.out_dir, "output directory")->required();

    AlignOpts align;
    auto* align_cmd =
        app.add_subcommand("align", "fit a rigid transform to point correspondences");
    align_cmd->add_option("--points", align.points_path, "correspondence CSV")->required();
    align_cmd->add_option("--out", align.out_path, "also write the report JSON here");

    PipelineOpts pipeline;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "run the full capture pipeline");
    pipeline_cmd->add_option("--config", pipeline.config_path, "pipeline config JSON")->required();
    pipeline_cmd->add_option("--out-dir", pipeline.out_dir, "override the output directory");
    pipeline_cmd->add_option("--seed", pipeline.seed, "override the network seed");

    BenchOpts bench;
    auto* bench_cmd = app.add_subcommand("bench", "time the filter and mesh stages");
    bench_cmd->add_option("--camera", bench.camera_path, "camera model JSON")->required();
    bench_cmd->add_option("--frames", bench.frames, "frames to run");
    bench_cmd->add_option("--seed", bench.seed, "scene seed");
    bench_cmd->add_option("--geometry", bench.geometry, "scene geometry");
    bench_cmd->add_option("--out", bench.out_path, "also write the report JSON here");

    try {
        app.parse(argc, argv);
        if (synth_cmd->parsed()) run_synth(synth);
        if (filter_cmd->parsed()) run_filter(filter);
        if (sync_cmd->parsed()) run_sync(sync);
        if (mesh_cmd->parsed()) run_mesh(mesh);
        if (align_cmd->parsed()) run_align(align);
        if (pipeline_cmd->parsed()) run_pipeline_cmd(pipeline);
        if (bench_cmd->parsed()) run_bench_cmd(bench);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const volcap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

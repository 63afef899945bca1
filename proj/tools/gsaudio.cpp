// gsaudio: command-line front end for data generation, training, rendering,
// evaluation, ablations and benchmarking.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "gsaudio/core/parallel.hpp"
#include "gsaudio/core/weights_io.hpp"
#include "gsaudio/error.hpp"

namespace {

using namespace gsaudio;
using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 1, kNumeric = 2, kIo = 3 };

// Flags every subcommand accepts; set flags override the config file.
struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  std::string mode;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* mode_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Run configuration JSON")->check(CLI::ExistingFile);
    seed_opt = app->add_option("--seed", seed, "RNG seed");
    threads_opt = app->add_option("--threads", threads, "Worker threads (0 = hardware, 1 = bit-deterministic)");
    out_opt = app->add_option("--out", out, "Output path");
    mode_opt = app->add_option("--mode", mode, "binaural or rir")->check(CLI::IsMember({"binaural", "rir"}));
  }

  cli::RunConfig resolve() const {
    cli::RunConfig c = config.empty() ? cli::RunConfig{} : cli::load_run_config(config);
    if (seed_opt->count()) c.seed = seed;
    if (threads_opt->count()) c.threads = threads;
    if (out_opt->count()) c.out = out;
    if (mode_opt->count()) c.mode = parse_mode(mode);
    c.propagate();
    core::set_thread_count(c.threads);
    return c;
  }
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("gsaudio");
  spdlog::set_default_logger(logger);
  const char* level = std::getenv("GSAUDIO_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int run(int argc, char** argv) {
  CLI::App app{"Binaural audio synthesis from Gaussian-splat scenes"};
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, render_flags, eval_flags, ablate_flags, bench_flags;

  auto* gen = app.add_subcommand("gen-data", "Synthesize a shoebox-room dataset");
  gen_flags.attach(gen);
  std::size_t samples = 0;
  auto* samples_opt = gen->add_option("--samples", samples, "Number of samples");

  auto* train = app.add_subcommand("train", "Train a model on a dataset");
  train_flags.attach(train);
  std::string train_dataset, resume;
  std::size_t train_iterations = 0;
  auto* train_dataset_opt = train->add_option("--dataset", train_dataset, "Dataset directory");
  train->add_option("--resume", resume, "Checkpoint directory to continue from")->check(CLI::ExistingDirectory);
  auto* train_iter_opt = train->add_option("--iterations", train_iterations, "Total training iterations");

  auto* render = app.add_subcommand("render", "Render binaural audio for one listener pose");
  render_flags.attach(render);
  cli::RenderRequest request;
  std::string checkpoint, input;
  std::vector<double> position;
  double yaw = 0.0;
  render->add_option("--checkpoint", checkpoint, "Checkpoint directory")->required();
  render->add_option("--input", input, "Mono WAV (binaural checkpoints)");
  render->add_option("--position", position, "Listener position x y z")->expected(3)->required();
  render->add_option("--yaw", yaw, "Listener heading in radians (0 faces +x)");

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a dataset split");
  eval_flags.attach(eval);
  std::string eval_checkpoint, eval_dataset, split = "val";
  eval->add_option("--checkpoint", eval_checkpoint, "Checkpoint directory")->required();
  auto* eval_dataset_opt = eval->add_option("--dataset", eval_dataset, "Dataset directory");
  eval->add_option("--split", split, "train or val")->check(CLI::IsMember({"train", "val"}));

  auto* ablate = app.add_subcommand("ablate", "Sweep one design axis and tabulate validation scores");
  ablate_flags.attach(ablate);
  std::string axis, ablate_dataset;
  std::size_t ablate_iterations = 0;
  ablate->add_option("--axis", axis, "vicinity or alpha_init")->required()->check(
      CLI::IsMember({"vicinity", "alpha_init"}));
  auto* ablate_dataset_opt = ablate->add_option("--dataset", ablate_dataset, "Dataset directory");
  auto* ablate_iter_opt = ablate->add_option("--iterations", ablate_iterations, "Training iterations per row");

  auto* bench = app.add_subcommand("bench", "Time one-second renders");
  bench_flags.attach(bench);
  std::string bench_checkpoint;
  std::size_t renders = 100;
  bench->add_option("--checkpoint", bench_checkpoint, "Checkpoint directory")->required();
  bench->add_option("-n,--renders", renders, "Number of renders (at least 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (gen->parsed()) {
    auto c = gen_flags.resolve();
    if (samples_opt->count()) c.data.samples = samples;
    print(cli::gen_data(c));
  } else if (train->parsed()) {
    auto c = train_flags.resolve();
    if (train_dataset_opt->count()) c.dataset = train_dataset;
    if (train_iter_opt->count()) c.train.iterations = train_iterations;
    print(cli::train(c, resume.empty() ? std::nullopt : std::optional<fs::path>(resume)));
  } else if (render->parsed()) {
    const auto c = render_flags.resolve();
    request.checkpoint = checkpoint;
    request.input = input;
    request.output = render_flags.out_opt->count() ? fs::path(render_flags.out) : fs::path("render.wav");
    request.pose = scene::Pose::from_yaw({{position[0], position[1], position[2]}}, yaw);
    (void)c;
    print(cli::render(request));
  } else if (eval->parsed()) {
    const auto c = eval_flags.resolve();
    const fs::path dataset = eval_dataset_opt->count() ? fs::path(eval_dataset) : c.dataset;
    const json report = cli::evaluate(eval_checkpoint, dataset, split);
    fs::create_directories(c.out);
    core::write_file_atomic(c.out / ("eval_" + split + ".json"), report.dump(2) + "\n");
    print(report);
  } else if (ablate->parsed()) {
    auto c = ablate_flags.resolve();
    if (ablate_dataset_opt->count()) c.dataset = ablate_dataset;
    if (ablate_iter_opt->count()) c.train.iterations = ablate_iterations;
    const json report = cli::ablate(c, axis);
    std::cout << cli::format_ablation(report);
  } else if (bench->parsed()) {
    const auto c = bench_flags.resolve();
    const json report = cli::bench(bench_checkpoint, renders);
    if (bench_flags.out_opt->count()) {
      fs::create_directories(c.out);
      core::write_file_atomic(c.out / "bench.json", report.dump(2) + "\n");
    }
    print(report);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  try {
    return run(argc, argv);
  } catch (const NumericError& e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  } catch (const MetricUndefined& e) {
    spdlog::error("{}", e.what());
    return kNumeric;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const std::exception& e) {
    // ConfigError, SchemaError, GeometryError and contract violations.
    spdlog::error("{}", e.what());
    return kUsage;
  }
}

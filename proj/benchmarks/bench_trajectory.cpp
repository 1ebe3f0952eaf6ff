#include <benchmark/benchmark.h>

#include "gvm/synth.hpp"
#include "gvm/trajectory.hpp"

namespace {

using namespace gvm;

TrajectoryInputs make_inputs(int frames) {
  synth::SynthConfig config;
  config.frames = frames;
  config.camera_mode = synth::CameraMode::handheld;
  const synth::SynthBundle bundle = synth::synth_sequence(5, config);
  TrajectoryInputs inputs;
  inputs.gamma_gv = bundle.gamma_gv;
  inputs.gamma_c = bundle.gamma_c;
  inputs.r_delta = bundle.r_delta;
  inputs.v_root = bundle.v_root;
  return inputs;
}

void BM_RecoverGlobalTrajectory(benchmark::State& state) {
  const TrajectoryInputs inputs = make_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    WorldTrajectory out = recover_global_trajectory(inputs);
    benchmark::DoNotOptimize(out.translation.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RecoverGlobalTrajectory)->Arg(300)->Arg(1430)->Arg(4096);

void BM_RelativeGvTrack(benchmark::State& state) {
  const TrajectoryInputs inputs = make_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto track = gv_relative_track(inputs.gamma_c, inputs.gamma_gv, inputs.r_delta);
    benchmark::DoNotOptimize(track.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RelativeGvTrack)->Arg(1430);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
    return 1;
  }
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}

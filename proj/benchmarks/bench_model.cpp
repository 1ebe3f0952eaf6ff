#include <benchmark/benchmark.h>

#include "gvm/model.hpp"
#include "gvm/random.hpp"

namespace {

using namespace gvm;

model::ModelConfig bench_config() {
  model::ModelConfig c;
  c.layers = 2;
  c.heads = 2;
  c.model_dim = 64;
  c.mlp_hidden = 128;
  c.train_len = 16;
  c.fusion_hidden = 64;
  c.head_hidden = 64;
  return c;
}

std::vector<model::FrameFeatures> bench_features(const model::ModelConfig& config, int frames) {
  Rng rng(3);
  std::vector<model::FrameFeatures> out(static_cast<std::size_t>(frames));
  for (auto& f : out) {
    f.bbox = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    f.keypoints.resize(config.keypoints, 3);
    for (Eigen::Index i = 0; i < f.keypoints.size(); ++i) {
      f.keypoints(i) = rng.uniform(-1.0, 1.0);
    }
    f.image_feature = Eigen::VectorXd::Zero(config.image_feature_dim);
    f.cam_rot.setZero();
    f.cam_rot(0) = 1.0;
    f.cam_rot(4) = 1.0;
  }
  return out;
}

void BM_TransformerForward(benchmark::State& state) {
  const model::ModelConfig config = bench_config();
  const model::ModelParams params = model::init_params(config, 1);
  const auto feats = bench_features(config, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    model::MultiTaskOutput out = model::model_forward(config, params, feats);
    benchmark::DoNotOptimize(out.raw[0].data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransformerForward)->Arg(120)->Arg(512)->Arg(1430)->Unit(benchmark::kMillisecond);

}  // namespace

#include <benchmark/benchmark.h>

#include "gvm/ik.hpp"
#include "gvm/random.hpp"
#include "gvm/skeleton.hpp"

namespace {

using namespace gvm;

void BM_CcdFootTargets(benchmark::State& state) {
  const Skeleton skel = Skeleton::smpl24();
  std::vector<Vec3> theta(static_cast<std::size_t>(skel.joint_count() - 1), Vec3::Zero());
  const auto rest = forward_kinematics(skel, Rotation::identity(), Vec3(0, 0.9, 0), theta);
  std::vector<IkTarget> targets = {
      {7, rest[7] + Vec3(0.05, -0.02, 0.03)},
      {8, rest[8] + Vec3(-0.04, -0.02, 0.05)},
  };
  IkParams params;
  params.max_iter = 20;
  params.tol = 1e-4;
  for (auto _ : state) {
    IkResult result =
        ccd_ik_solve(skel, Rotation::identity(), Vec3(0, 0.9, 0), theta, targets, params);
    benchmark::DoNotOptimize(result.theta.data());
  }
}
BENCHMARK(BM_CcdFootTargets)->Unit(benchmark::kMicrosecond);

}  // namespace

#pragma once

#include "gvm/model.hpp"

namespace gvm::model {

// Adam over the whole parameter set; moments are keyed by the fixed tensor
// visiting order.
class AdamOptimizer {
 public:
  struct Options {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  explicit AdamOptimizer(const ModelParams& reference);
  AdamOptimizer(const ModelParams& reference, Options options);

  void step(ModelParams& params, const ModelParams& grads);

 private:
  Options options_;
  ModelParams m_, v_;
  long step_ = 0;
};

}  // namespace gvm::model

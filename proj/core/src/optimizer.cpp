#include "gvm/optimizer.hpp"

#include <cmath>
#include <vector>

#include "gvm/errors.hpp"

namespace gvm::model {

namespace {

ModelParams zeroed_copy(const ModelParams& reference) {
  ModelParams out = reference;
  visit_tensors(out, [](const std::string&, Eigen::Map<Eigen::VectorXd> v) { v.setZero(); });
  return out;
}

}  // namespace

AdamOptimizer::AdamOptimizer(const ModelParams& reference)
    : AdamOptimizer(reference, Options{}) {}

AdamOptimizer::AdamOptimizer(const ModelParams& reference, Options options)
    : options_(options), m_(zeroed_copy(reference)), v_(zeroed_copy(reference)) {}

void AdamOptimizer::step(ModelParams& params, const ModelParams& grads) {
  ++step_;
  const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));

  std::vector<Eigen::Map<const Eigen::VectorXd>> g_list;
  visit_tensors(grads, [&g_list](const std::string&, Eigen::Map<const Eigen::VectorXd> g) {
    g_list.push_back(g);
  });
  std::vector<Eigen::Map<Eigen::VectorXd>> m_list, v_list;
  visit_tensors(m_, [&m_list](const std::string&, Eigen::Map<Eigen::VectorXd> m) {
    m_list.push_back(m);
  });
  visit_tensors(v_, [&v_list](const std::string&, Eigen::Map<Eigen::VectorXd> v) {
    v_list.push_back(v);
  });

  std::size_t i = 0;
  visit_tensors(params, [&](const std::string&, Eigen::Map<Eigen::VectorXd> p) {
    if (i >= g_list.size() || p.size() != g_list[i].size()) {
      throw ShapeMismatch("adam: gradient layout does not match parameters");
    }
    auto& m = m_list[i];
    auto& v = v_list[i];
    const auto& g = g_list[i];
    m = options_.beta1 * m + (1.0 - options_.beta1) * g;
    v = (options_.beta2 * v.array() + (1.0 - options_.beta2) * g.array().square()).matrix();
    p.array() -=
        options_.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + options_.eps);
    ++i;
  });
}

}  // namespace gvm::model

#include <cmath>
#include <numbers>
#include <string>

#include "gvm/errors.hpp"
#include "gvm/model.hpp"

namespace gvm::model {

namespace {

double gelu_grad(double x) {
  const double phi_cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double phi_pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return phi_cdf + x * phi_pdf;
}

// Reverse through one two-layer MLP; returns the gradient at its input.
Eigen::MatrixXd mlp_backward(const MlpParams& mlp, const MlpTrace& trace,
                             const Eigen::MatrixXd& g_out, MlpParams& grad) {
  grad.fc2.w += g_out * trace.act.transpose();
  grad.fc2.b += g_out.rowwise().sum();
  Eigen::MatrixXd g_act = mlp.fc2.w.transpose() * g_out;
  Eigen::MatrixXd g_pre =
      mlp.act == Activation::identity
          ? std::move(g_act)
          : (g_act.array() * trace.pre.unaryExpr([](double v) { return gelu_grad(v); }).array())
                .matrix();
  grad.fc1.w += g_pre * trace.input.transpose();
  grad.fc1.b += g_pre.rowwise().sum();
  return mlp.fc1.w.transpose() * g_pre;
}

// Reverse through layer norm; returns the gradient at its input.
Eigen::MatrixXd layer_norm_backward(const LayerNormParams& ln, const Eigen::MatrixXd& hat,
                                    const Eigen::VectorXd& inv_std, const Eigen::MatrixXd& g_out,
                                    LayerNormParams& grad) {
  Eigen::MatrixXd g_in(hat.rows(), hat.cols());
  for (Eigen::Index t = 0; t < hat.cols(); ++t) {
    grad.gain += (g_out.col(t).array() * hat.col(t).array()).matrix();
    grad.bias += g_out.col(t);
    const Eigen::VectorXd g_hat = (g_out.col(t).array() * ln.gain.array()).matrix();
    const double mean_g = g_hat.mean();
    const double mean_gh = (g_hat.array() * hat.col(t).array()).mean();
    g_in.col(t) =
        inv_std(t) * (g_hat.array() - mean_g - hat.col(t).array() * mean_gh).matrix();
  }
  return g_in;
}

// Rotates each per-head pair of every column by minus its position (the
// adjoint of the forward rotary rotation).
void rope_unrotate_all(const ModelConfig& config, Eigen::MatrixXd& m,
                       std::span<const int> positions, std::span<const double> freqs) {
  const int dh = config.head_dim();
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    const auto pos = positions[static_cast<std::size_t>(t)];
    for (int h = 0; h < config.heads; ++h) {
      for (int k = 0; k * 2 < dh; ++k) {
        const double angle = -static_cast<double>(pos) * freqs[static_cast<std::size_t>(k)];
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const Eigen::Index i = h * dh + 2 * k;
        const double a = m(i, t);
        const double b = m(i + 1, t);
        m(i, t) = c * a - s * b;
        m(i + 1, t) = s * a + c * b;
      }
    }
  }
}

Eigen::MatrixXd attention_backward(const ModelConfig& config, const AttentionParams& attn,
                                   const LayerTrace& trace, std::span<const int> positions,
                                   const Eigen::MatrixXd& g_attn_out, AttentionParams& grad) {
  const Eigen::Index frames = g_attn_out.cols();
  const int dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto freqs = rope_frequencies(dh, config.rope_base);

  grad.wo += g_attn_out * trace.attn_concat.transpose();
  const Eigen::MatrixXd g_concat = attn.wo.transpose() * g_attn_out;

  Eigen::MatrixXd g_q_rot = Eigen::MatrixXd::Zero(config.model_dim, frames);
  Eigen::MatrixXd g_k_rot = Eigen::MatrixXd::Zero(config.model_dim, frames);
  Eigen::MatrixXd g_v = Eigen::MatrixXd::Zero(config.model_dim, frames);

  for (int h = 0; h < config.heads; ++h) {
    const auto& p = trace.probs[static_cast<std::size_t>(h)];
    const auto g_oh = g_concat.middleRows(h * dh, dh);
    const auto vh = trace.v.middleRows(h * dh, dh);
    const auto qh = trace.q_rot.middleRows(h * dh, dh);
    const auto kh = trace.k_rot.middleRows(h * dh, dh);

    g_v.middleRows(h * dh, dh) = g_oh * p;
    Eigen::MatrixXd g_p = g_oh.transpose() * vh;

    // Softmax rows; masked entries have p == 0 and drop out on their own.
    Eigen::MatrixXd g_a(frames, frames);
    for (Eigen::Index t = 0; t < frames; ++t) {
      const double dot = g_p.row(t).dot(p.row(t));
      g_a.row(t) = p.row(t).array() * (g_p.row(t).array() - dot);
    }
    g_q_rot.middleRows(h * dh, dh) = scale * kh * g_a.transpose();
    g_k_rot.middleRows(h * dh, dh) = scale * qh * g_a;
  }

  rope_unrotate_all(config, g_q_rot, positions, freqs);
  rope_unrotate_all(config, g_k_rot, positions, freqs);

  grad.wq += g_q_rot * trace.ln1_out.transpose();
  grad.wk += g_k_rot * trace.ln1_out.transpose();
  grad.wv += g_v * trace.ln1_out.transpose();
  return attn.wq.transpose() * g_q_rot + attn.wk.transpose() * g_k_rot +
         attn.wv.transpose() * g_v;
}

}  // namespace

ModelParams model_backward(const ModelConfig& config, const ModelParams& params,
                           const ForwardTrace& trace, const HeadGradients& d_heads,
                           Eigen::MatrixXd* d_tokens) {
  ModelParams grads = params;
  visit_tensors(grads, [](const std::string&, Eigen::Map<Eigen::VectorXd> v) { v.setZero(); });

  // Heads share the encoded tokens.
  Eigen::MatrixXd g_encoded = Eigen::MatrixXd::Zero(trace.encoded.rows(), trace.encoded.cols());
  for (int t = 0; t < kTaskCount; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (d_heads.d_raw[ti].size() == 0) {
      continue;
    }
    g_encoded += mlp_backward(params.heads[ti], trace.heads[ti], d_heads.d_raw[ti],
                              grads.heads[ti]);
  }

  Eigen::MatrixXd g = std::move(g_encoded);
  for (auto l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    const EncoderLayerParams& layer = params.layers[li];
    const LayerTrace& lt = trace.layers[li];
    EncoderLayerParams& lg = grads.layers[li];

    // output = mid + mlp(ln2(mid))
    MlpTrace mlp_trace;
    mlp_trace.input = lt.ln2_out;
    mlp_trace.pre = lt.mlp_pre;
    mlp_trace.act = lt.mlp_act;
    const Eigen::MatrixXd g_ln2 = mlp_backward(layer.mlp, mlp_trace, g, lg.mlp);
    Eigen::MatrixXd g_mid =
        g + layer_norm_backward(layer.ln_mlp, lt.ln2_hat, lt.ln2_inv_std, g_ln2, lg.ln_mlp);

    // mid = input + attention(ln1(input))
    const Eigen::MatrixXd g_ln1 =
        attention_backward(config, layer.attn, lt, trace.positions, g_mid, lg.attn);
    g = g_mid + layer_norm_backward(layer.ln_attn, lt.ln1_hat, lt.ln1_inv_std, g_ln1, lg.ln_attn);
  }

  if (d_tokens != nullptr) {
    *d_tokens = g;
  }
  for (int gidx = 0; gidx < kFeatureGroupCount; ++gidx) {
    const auto gi = static_cast<std::size_t>(gidx);
    mlp_backward(params.fusion[gi], trace.fusion[gi], g, grads.fusion[gi]);
  }
  return grads;
}

}  // namespace gvm::model

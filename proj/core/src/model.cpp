#include "gvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gvm/errors.hpp"
#include "gvm/random.hpp"

namespace gvm::model {

namespace {

constexpr double kLnEps = 1e-5;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

Eigen::MatrixXd activate(const Eigen::MatrixXd& x, Activation act) {
  if (act == Activation::identity) {
    return x;
  }
  return x.unaryExpr([](double v) { return gelu(v); });
}

Eigen::MatrixXd mlp_forward(const MlpParams& mlp, const Eigen::MatrixXd& input, MlpTrace* trace) {
  Eigen::MatrixXd pre = (mlp.fc1.w * input).colwise() + mlp.fc1.b;
  Eigen::MatrixXd act = activate(pre, mlp.act);
  Eigen::MatrixXd out = (mlp.fc2.w * act).colwise() + mlp.fc2.b;
  if (trace != nullptr) {
    trace->input = input;
    trace->pre = std::move(pre);
    trace->act = std::move(act);
  }
  return out;
}

Eigen::MatrixXd layer_norm(const LayerNormParams& ln, const Eigen::MatrixXd& x,
                           Eigen::MatrixXd* hat_out, Eigen::VectorXd* inv_std_out) {
  const Eigen::Index dim = x.rows();
  Eigen::MatrixXd hat(x.rows(), x.cols());
  Eigen::VectorXd inv_std(x.cols());
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    const double mu = x.col(t).mean();
    const double var = (x.col(t).array() - mu).square().sum() / static_cast<double>(dim);
    inv_std(t) = 1.0 / std::sqrt(var + kLnEps);
    hat.col(t) = (x.col(t).array() - mu) * inv_std(t);
  }
  Eigen::MatrixXd out =
      (hat.array().colwise() * ln.gain.array()).colwise() + ln.bias.array();
  if (hat_out != nullptr) {
    *hat_out = std::move(hat);
  }
  if (inv_std_out != nullptr) {
    *inv_std_out = std::move(inv_std);
  }
  return out;
}

LinearParams init_linear(int out_dim, int in_dim, Rng& rng) {
  LinearParams lin;
  lin.w.resize(out_dim, in_dim);
  const double a = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (Eigen::Index j = 0; j < lin.w.cols(); ++j) {
    for (Eigen::Index i = 0; i < lin.w.rows(); ++i) {
      lin.w(i, j) = rng.uniform(-a, a);
    }
  }
  lin.b = Eigen::VectorXd::Zero(out_dim);
  return lin;
}

MlpParams init_mlp(int out_dim, int hidden, int in_dim, Rng& rng) {
  MlpParams mlp;
  mlp.fc1 = init_linear(hidden, in_dim, rng);
  mlp.fc2 = init_linear(out_dim, hidden, rng);
  return mlp;
}

Eigen::MatrixXd init_weight(int out_dim, int in_dim, Rng& rng) {
  return init_linear(out_dim, in_dim, rng).w;
}

template <typename Params, typename Fn>
void visit_impl(Params& params, Fn&& fn) {
  static const char* group_names[kFeatureGroupCount] = {"bbox", "keypoints", "image", "cam_rot"};
  auto mat = [&fn](const std::string& name, auto& m) { fn(name, m.data(), m.rows(), m.cols()); };
  auto mlp = [&](const std::string& prefix, auto& m) {
    mat(prefix + ".fc1.w", m.fc1.w);
    mat(prefix + ".fc1.b", m.fc1.b);
    mat(prefix + ".fc2.w", m.fc2.w);
    mat(prefix + ".fc2.b", m.fc2.b);
  };
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    mlp(std::string("fusion.") + group_names[g], params.fusion[static_cast<std::size_t>(g)]);
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    const std::string p = "layer" + std::to_string(l);
    mat(p + ".ln_attn.gain", layer.ln_attn.gain);
    mat(p + ".ln_attn.bias", layer.ln_attn.bias);
    mat(p + ".attn.wq", layer.attn.wq);
    mat(p + ".attn.wk", layer.attn.wk);
    mat(p + ".attn.wv", layer.attn.wv);
    mat(p + ".attn.wo", layer.attn.wo);
    mat(p + ".ln_mlp.gain", layer.ln_mlp.gain);
    mat(p + ".ln_mlp.bias", layer.ln_mlp.bias);
    mlp(p + ".mlp", layer.mlp);
  }
  for (int t = 0; t < kTaskCount; ++t) {
    mlp(std::string("head.") + task_name(static_cast<Task>(t)),
        params.heads[static_cast<std::size_t>(t)]);
  }
}

}  // namespace

const char* task_name(Task t) {
  switch (t) {
    case Task::weak_cam:
      return "weak_cam";
    case Task::gamma_c:
      return "gamma_c";
    case Task::theta:
      return "theta";
    case Task::beta:
      return "beta";
    case Task::stationary:
      return "stationary";
    case Task::gamma_gv:
      return "gamma_gv";
    case Task::v_root:
      return "v_root";
  }
  return "?";
}

int ModelConfig::feature_dim(FeatureGroup g) const {
  switch (g) {
    case FeatureGroup::bbox:
      return 3;
    case FeatureGroup::keypoints:
      return 3 * keypoints;
    case FeatureGroup::image:
      return image_feature_dim;
    case FeatureGroup::cam_rot:
      return 6;
  }
  return 0;
}

int ModelConfig::task_dim(Task t) const {
  switch (t) {
    case Task::weak_cam:
      return 3;
    case Task::gamma_c:
      return 6;
    case Task::theta:
      return 3 * pose_joints;
    case Task::beta:
      return 10;
    case Task::stationary:
      return stationary_joints;
    case Task::gamma_gv:
      return 6;
    case Task::v_root:
      return 3;
  }
  return 0;
}

void ModelConfig::validate() const {
  if (layers < 1 || heads < 1 || model_dim < 2 || mlp_hidden < 1 || train_len < 1 ||
      fusion_hidden < 1 || head_hidden < 1 || keypoints < 1 || image_feature_dim < 1 ||
      pose_joints < 1 || stationary_joints < 1 || rope_base <= 1.0) {
    throw BadConfig("model config: all dimensions must be positive");
  }
  if (model_dim % heads != 0) {
    throw BadConfig("model config: model_dim must be divisible by heads");
  }
  if (head_dim() % 2 != 0) {
    throw BadConfig("model config: per-head dimension must be even for rotary pairs");
  }
}

ModelConfig ModelConfig::full_scale() {
  ModelConfig c;
  c.layers = 12;
  c.heads = 8;
  c.model_dim = 512;
  c.mlp_hidden = 2048;
  c.train_len = 120;
  c.fusion_hidden = 512;
  c.head_hidden = 512;
  c.keypoints = 17;
  c.image_feature_dim = 1024;
  c.pose_joints = 21;
  c.stationary_joints = 6;
  return c;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ModelParams p;
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    p.fusion[static_cast<std::size_t>(g)] =
        init_mlp(config.model_dim, config.fusion_hidden,
                 config.feature_dim(static_cast<FeatureGroup>(g)), rng);
  }
  p.layers.resize(static_cast<std::size_t>(config.layers));
  for (auto& layer : p.layers) {
    layer.ln_attn.gain = Eigen::VectorXd::Ones(config.model_dim);
    layer.ln_attn.bias = Eigen::VectorXd::Zero(config.model_dim);
    layer.ln_mlp.gain = Eigen::VectorXd::Ones(config.model_dim);
    layer.ln_mlp.bias = Eigen::VectorXd::Zero(config.model_dim);
    layer.attn.wq = init_weight(config.model_dim, config.model_dim, rng);
    layer.attn.wk = init_weight(config.model_dim, config.model_dim, rng);
    layer.attn.wv = init_weight(config.model_dim, config.model_dim, rng);
    layer.attn.wo = init_weight(config.model_dim, config.model_dim, rng);
    layer.mlp = init_mlp(config.model_dim, config.mlp_hidden, config.model_dim, rng);
  }
  for (int t = 0; t < kTaskCount; ++t) {
    p.heads[static_cast<std::size_t>(t)] =
        init_mlp(config.task_dim(static_cast<Task>(t)), config.head_hidden, config.model_dim, rng);
  }
  return p;
}

ModelParams zero_params(const ModelConfig& config) {
  ModelParams p = init_params(config, 0);
  visit_tensors(p, [](const std::string&, Eigen::Map<Eigen::VectorXd> data) { data.setZero(); });
  return p;
}

void visit_tensors(ModelParams& params, const TensorVisitor& visit) {
  visit_impl(params,
             [&](const std::string& name, double* data, Eigen::Index rows, Eigen::Index cols) {
               visit(name, Eigen::Map<Eigen::VectorXd>(data, rows * cols));
             });
}

void visit_tensors(
    const ModelParams& params,
    const std::function<void(const std::string&, Eigen::Map<const Eigen::VectorXd>)>& visit) {
  visit_impl(params, [&](const std::string& name, const double* data, Eigen::Index rows,
                         Eigen::Index cols) {
    visit(name, Eigen::Map<const Eigen::VectorXd>(data, rows * cols));
  });
}

void visit_tensors_shaped(const ModelParams& params, const ShapedTensorVisitor& visit) {
  visit_impl(params, [&](const std::string& name, const double* data, Eigen::Index rows,
                         Eigen::Index cols) { visit(name, rows, cols, data); });
}

TokenSequence early_fuse(const ModelConfig& config, const ModelParams& params,
                         std::span<const FrameFeatures> features, ForwardTrace* trace) {
  const auto frames = static_cast<Eigen::Index>(features.size());
  std::array<Eigen::MatrixXd, kFeatureGroupCount> grouped;
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    grouped[static_cast<std::size_t>(g)].resize(config.feature_dim(static_cast<FeatureGroup>(g)),
                                                frames);
  }
  for (Eigen::Index t = 0; t < frames; ++t) {
    const FrameFeatures& f = features[static_cast<std::size_t>(t)];
    if (f.keypoints.rows() != config.keypoints || f.keypoints.cols() != 3) {
      throw ShapeMismatch("early_fuse: keypoints must be " + std::to_string(config.keypoints) +
                          " x 3 at frame " + std::to_string(t));
    }
    if (f.image_feature.size() != config.image_feature_dim) {
      throw ShapeMismatch("early_fuse: image feature dim mismatch at frame " + std::to_string(t));
    }
    grouped[0].col(t) = f.bbox;
    grouped[1].col(t) =
        Eigen::Map<const Eigen::VectorXd>(f.keypoints.data(), f.keypoints.size());
    grouped[2].col(t) = f.image_feature;
    grouped[3].col(t) = f.cam_rot;
  }

  TokenSequence seq;
  seq.tokens = Eigen::MatrixXd::Zero(config.model_dim, frames);
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    MlpTrace* mt = trace != nullptr ? &trace->fusion[static_cast<std::size_t>(g)] : nullptr;
    seq.tokens += mlp_forward(params.fusion[static_cast<std::size_t>(g)],
                              grouped[static_cast<std::size_t>(g)], mt);
  }
  seq.positions.resize(static_cast<std::size_t>(frames));
  for (Eigen::Index t = 0; t < frames; ++t) {
    seq.positions[static_cast<std::size_t>(t)] = static_cast<int>(t);
  }
  if (trace != nullptr) {
    trace->tokens = seq.tokens;
    trace->positions = seq.positions;
  }
  return seq;
}

std::vector<double> rope_frequencies(int head_dim, double base) {
  if (head_dim % 2 != 0) {
    throw OddDimension("rope_frequencies: head dimension must be even");
  }
  std::vector<double> freqs(static_cast<std::size_t>(head_dim / 2));
  for (int k = 0; k < head_dim / 2; ++k) {
    freqs[static_cast<std::size_t>(k)] =
        std::pow(base, -2.0 * static_cast<double>(k) / static_cast<double>(head_dim));
  }
  return freqs;
}

Eigen::VectorXd rope_pair_rotate(const Eigen::VectorXd& v, int position,
                                 std::span<const double> freqs) {
  if (v.size() % 2 != 0) {
    throw OddDimension("rope_pair_rotate: vector length must be even");
  }
  if (static_cast<std::size_t>(v.size() / 2) != freqs.size()) {
    throw ShapeMismatch("rope_pair_rotate: need one frequency per pair");
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index k = 0; k * 2 < v.size(); ++k) {
    const double angle = static_cast<double>(position) * freqs[static_cast<std::size_t>(k)];
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    out(2 * k) = c * v(2 * k) - s * v(2 * k + 1);
    out(2 * k + 1) = s * v(2 * k) + c * v(2 * k + 1);
  }
  return out;
}

namespace {

// Applies the per-head rotary rotation to every column of a model_dim x T
// matrix in place.
void rope_rotate_all(const ModelConfig& config, Eigen::MatrixXd& m,
                     std::span<const int> positions, std::span<const double> freqs) {
  const int dh = config.head_dim();
  for (Eigen::Index t = 0; t < m.cols(); ++t) {
    const auto pos = positions[static_cast<std::size_t>(t)];
    for (int h = 0; h < config.heads; ++h) {
      for (int k = 0; k * 2 < dh; ++k) {
        const double angle = static_cast<double>(pos) * freqs[static_cast<std::size_t>(k)];
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

}  // namespace

Eigen::MatrixXd attention_logits(const ModelConfig& config, const AttentionParams& attn,
                                 const Eigen::MatrixXd& q_tokens, const Eigen::MatrixXd& k_tokens,
                                 std::span<const int> positions, int head) {
  if (q_tokens.rows() != config.model_dim || k_tokens.rows() != config.model_dim ||
      q_tokens.cols() != k_tokens.cols() ||
      positions.size() != static_cast<std::size_t>(q_tokens.cols())) {
    throw ShapeMismatch("attention_logits: inconsistent token shapes");
  }
  if (head < 0 || head >= config.heads) {
    throw ShapeMismatch("attention_logits: head index out of range");
  }
  const int dh = config.head_dim();
  const auto freqs = rope_frequencies(dh, config.rope_base);

  Eigen::MatrixXd q = attn.wq * q_tokens;
  Eigen::MatrixXd k = attn.wk * k_tokens;
  rope_rotate_all(config, q, positions, freqs);
  rope_rotate_all(config, k, positions, freqs);

  const Eigen::MatrixXd qh = q.middleRows(head * dh, dh);
  const Eigen::MatrixXd kh = k.middleRows(head * dh, dh);
  return qh.transpose() * kh / std::sqrt(static_cast<double>(dh));
}

Eigen::MatrixXd masked_self_attention(const ModelConfig& config, const AttentionParams& attn,
                                      const Eigen::MatrixXd& tokens,
                                      std::span<const int> positions, int band_limit,
                                      LayerTrace* trace) {
  if (band_limit < 1) {
    throw BadConfig("masked_self_attention: band limit must be >= 1");
  }
  if (tokens.rows() != config.model_dim ||
      positions.size() != static_cast<std::size_t>(tokens.cols())) {
    throw ShapeMismatch("masked_self_attention: inconsistent token shapes");
  }
  const Eigen::Index frames = tokens.cols();
  const int dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto freqs = rope_frequencies(dh, config.rope_base);

  Eigen::MatrixXd q = attn.wq * tokens;
  Eigen::MatrixXd k = attn.wk * tokens;
  Eigen::MatrixXd v = attn.wv * tokens;
  Eigen::MatrixXd q_rot = q;
  Eigen::MatrixXd k_rot = k;
  rope_rotate_all(config, q_rot, positions, freqs);
  rope_rotate_all(config, k_rot, positions, freqs);

  // TODO: store the band only; the dense T x T rows waste memory on long clips.
  Eigen::MatrixXd concat(config.model_dim, frames);
  std::vector<Eigen::MatrixXd> probs;
  probs.reserve(static_cast<std::size_t>(config.heads));
  for (int h = 0; h < config.heads; ++h) {
    const auto qh = q_rot.middleRows(h * dh, dh);
    const auto kh = k_rot.middleRows(h * dh, dh);
    const auto vh = v.middleRows(h * dh, dh);

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(frames, frames);
    for (Eigen::Index t = 0; t < frames; ++t) {
      const int pt = positions[static_cast<std::size_t>(t)];
      double row_max = -std::numeric_limits<double>::infinity();
      for (Eigen::Index s = 0; s < frames; ++s) {
        const int ps = positions[static_cast<std::size_t>(s)];
        if (std::abs(pt - ps) < band_limit) {
          const double logit = qh.col(t).dot(kh.col(s)) * scale;
          p(t, s) = logit;
          row_max = std::max(row_max, logit);
        }
      }
      double denom = 0.0;
      for (Eigen::Index s = 0; s < frames; ++s) {
        const int ps = positions[static_cast<std::size_t>(s)];
        if (std::abs(pt - ps) < band_limit) {
          p(t, s) = std::exp(p(t, s) - row_max);
          denom += p(t, s);
        } else {
          p(t, s) = 0.0;
        }
      }
      p.row(t) /= denom;
    }
    concat.middleRows(h * dh, dh) = vh * p.transpose();
    probs.push_back(std::move(p));
  }

  Eigen::MatrixXd out = attn.wo * concat;
  if (trace != nullptr) {
    trace->q = std::move(q);
    trace->k = std::move(k);
    trace->v = std::move(v);
    trace->q_rot = std::move(q_rot);
    trace->k_rot = std::move(k_rot);
    trace->probs = std::move(probs);
    trace->attn_concat = std::move(concat);
    trace->attn_out = out;
  }
  return out;
}

Eigen::MatrixXd transformer_forward(const ModelConfig& config, const ModelParams& params,
                                    const TokenSequence& tokens, ForwardTrace* trace) {
  config.validate();
  if (static_cast<int>(params.layers.size()) != config.layers) {
    throw ShapeMismatch("transformer_forward: layer count mismatch");
  }
  Eigen::MatrixXd x = tokens.tokens;
  if (trace != nullptr) {
    trace->layers.resize(params.layers.size());
    trace->positions = tokens.positions;
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const EncoderLayerParams& layer = params.layers[l];
    LayerTrace* lt = trace != nullptr ? &trace->layers[l] : nullptr;
    if (lt != nullptr) {
      lt->input = x;
    }

    Eigen::MatrixXd ln1 = layer_norm(layer.ln_attn, x, lt != nullptr ? &lt->ln1_hat : nullptr,
                                     lt != nullptr ? &lt->ln1_inv_std : nullptr);
    if (lt != nullptr) {
      lt->ln1_out = ln1;
    }
    Eigen::MatrixXd attn =
        masked_self_attention(config, layer.attn, ln1, tokens.positions, config.train_len, lt);
    Eigen::MatrixXd mid = x + attn;
    if (lt != nullptr) {
      lt->mid = mid;
    }

    Eigen::MatrixXd ln2 = layer_norm(layer.ln_mlp, mid, lt != nullptr ? &lt->ln2_hat : nullptr,
                                     lt != nullptr ? &lt->ln2_inv_std : nullptr);
    if (lt != nullptr) {
      lt->ln2_out = ln2;
    }
    MlpTrace mlp_trace;
    Eigen::MatrixXd mlp_out = mlp_forward(layer.mlp, ln2, lt != nullptr ? &mlp_trace : nullptr);
    if (lt != nullptr) {
      lt->mlp_pre = std::move(mlp_trace.pre);
      lt->mlp_act = std::move(mlp_trace.act);
    }
    x = mid + mlp_out;
    if (lt != nullptr) {
      lt->output = x;
    }
  }
  if (trace != nullptr) {
    trace->encoded = x;
  }
  return x;
}

MultiTaskOutput multitask_heads(const ModelConfig& config, const ModelParams& params,
                                const Eigen::MatrixXd& encoded, ForwardTrace* trace) {
  if (encoded.rows() != config.model_dim) {
    throw ShapeMismatch("multitask_heads: encoded tokens must have model_dim rows");
  }
  MultiTaskOutput out;
  for (int t = 0; t < kTaskCount; ++t) {
    MlpTrace* mt = trace != nullptr ? &trace->heads[static_cast<std::size_t>(t)] : nullptr;
    out.raw[static_cast<std::size_t>(t)] =
        mlp_forward(params.heads[static_cast<std::size_t>(t)], encoded, mt);
  }
  return out;
}

MultiTaskOutput model_forward(const ModelConfig& config, const ModelParams& params,
                              std::span<const FrameFeatures> features, ForwardTrace* trace) {
  const TokenSequence tokens = early_fuse(config, params, features, trace);
  const Eigen::MatrixXd encoded = transformer_forward(config, params, tokens, trace);
  return multitask_heads(config, params, encoded, trace);
}

Rotation MultiTaskOutput::gamma_c(int frame) const {
  return decode_rotation_6d(of(Task::gamma_c).col(frame));
}

Rotation MultiTaskOutput::gamma_gv(int frame) const {
  return decode_rotation_6d(of(Task::gamma_gv).col(frame));
}

Vec3 MultiTaskOutput::v_root(int frame) const { return of(Task::v_root).col(frame); }

double MultiTaskOutput::stationary_prob(int frame, int joint) const {
  return 1.0 / (1.0 + std::exp(-of(Task::stationary)(joint, frame)));
}

Rotation decode_rotation_6d(const Eigen::Matrix<double, 6, 1>& v) {
  Vec3 a1 = v.head<3>();
  Vec3 a2 = v.tail<3>();
  if (a1.norm() < 1e-12) {
    a1 = Vec3(1.0, 0.0, 0.0);
  }
  const Vec3 b1 = a1.normalized();
  Vec3 u2 = a2 - b1.dot(a2) * b1;
  if (u2.norm() < 1e-12) {
    const Vec3 seed = std::abs(b1.y()) < 0.9 ? Vec3(0.0, 1.0, 0.0) : Vec3(0.0, 0.0, 1.0);
    u2 = seed - b1.dot(seed) * b1;
  }
  const Vec3 b2 = u2.normalized();
  const Vec3 b3 = b1.cross(b2);
  Mat3 m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b3;
  return Rotation::from_matrix(m, 1e-9);
}

Eigen::Matrix<double, 6, 1> encode_rotation_6d(const Rotation& r) {
  Eigen::Matrix<double, 6, 1> v;
  v.head<3>() = r.matrix().col(0);
  v.tail<3>() = r.matrix().col(1);
  return v;
}

Vec3 restore_full_translation(const Eigen::Vector3d& weak_cam, const Eigen::Vector3d& bbox,
                              const CameraIntrinsics& intrinsics) {
  const double s = weak_cam(0);
  const double b = bbox(2);
  if (s <= 0.0 || b <= 0.0 || intrinsics.f <= 0.0) {
    throw NonPositiveScale("restore_full_translation: scale, crop size and focal length must be positive");
  }
  const double sb = s * b;
  return Vec3(weak_cam(1) + 2.0 * (bbox(0) - intrinsics.px) / sb,
              weak_cam(2) + 2.0 * (bbox(1) - intrinsics.py) / sb, 2.0 * intrinsics.f / sb);
}

double tensor_checksum(const Eigen::MatrixXd& m) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      sum += m(i, j) * static_cast<double>((i * 31 + j * 17) % 7 + 1);
    }
  }
  return sum;
}

Vec3 wrap_axis_angle(const Vec3& v) {
  const double n = v.norm();
  if (n <= std::numbers::pi) {
    return v;
  }
  double wrapped = std::fmod(n + std::numbers::pi, 2.0 * std::numbers::pi) - std::numbers::pi;
  return v / n * wrapped;
}

}  // namespace gvm::model

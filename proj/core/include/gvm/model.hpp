#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gvm/camera.hpp"
#include "gvm/rotmath.hpp"

namespace gvm::model {

enum class Activation { gelu, identity };

enum class FeatureGroup : int { bbox = 0, keypoints, image, cam_rot };
inline constexpr int kFeatureGroupCount = 4;

enum class Task : int { weak_cam = 0, gamma_c, theta, beta, stationary, gamma_gv, v_root };
inline constexpr int kTaskCount = 7;
const char* task_name(Task t);

struct ModelConfig {
  int layers = 2;
  int heads = 2;
  int model_dim = 64;
  int mlp_hidden = 128;
  int train_len = 16;  // receptive-field half-width L
  double rope_base = 10000.0;

  int fusion_hidden = 64;
  int head_hidden = 64;

  int keypoints = 17;
  int image_feature_dim = 16;
  int pose_joints = 23;       // regressed local joint rotations
  int stationary_joints = 6;  // hands, toes, heels

  int head_dim() const { return model_dim / heads; }
  int feature_dim(FeatureGroup g) const;
  int task_dim(Task t) const;

  // Throws BadConfig: model_dim must divide evenly into heads and each head
  // dimension must be even (rotary pairs).
  void validate() const;

  // Full-scale configuration: 12 layers, 8 heads, 512-d tokens, L = 120.
  static ModelConfig full_scale();
};

struct LinearParams {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

struct MlpParams {
  LinearParams fc1, fc2;
  Activation act = Activation::gelu;
};

struct AttentionParams {
  Eigen::MatrixXd wq, wk, wv, wo;  // model_dim x model_dim, no biases
};

struct LayerNormParams {
  Eigen::VectorXd gain, bias;
};

struct EncoderLayerParams {
  LayerNormParams ln_attn, ln_mlp;
  AttentionParams attn;
  MlpParams mlp;
};

struct ModelParams {
  std::array<MlpParams, kFeatureGroupCount> fusion;
  std::vector<EncoderLayerParams> layers;
  std::array<MlpParams, kTaskCount> heads;
};

// Seeded Xavier-uniform initialization (deterministic RNG).
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);
ModelParams zero_params(const ModelConfig& config);

// Visits every parameter tensor as a flat map over its storage; used by the
// optimizer, finite-difference checks and the checkpoint codec. Visiting
// order is fixed.
using TensorVisitor =
    std::function<void(const std::string& name, Eigen::Map<Eigen::VectorXd> data)>;
void visit_tensors(ModelParams& params, const TensorVisitor& visit);
void visit_tensors(const ModelParams& params,
                   const std::function<void(const std::string&, Eigen::Map<const Eigen::VectorXd>)>&
                       visit);

// Shape-aware read-only variant (column-major storage), used by the
// checkpoint codec.
using ShapedTensorVisitor = std::function<void(const std::string& name, Eigen::Index rows,
                                               Eigen::Index cols, const double* data)>;
void visit_tensors_shaped(const ModelParams& params, const ShapedTensorVisitor& visit);

// Inputs for one frame. Keypoints are (x, y, confidence) rows normalized to
// [-1, 1] by the crop; the image feature is zeroable; cam_rot is the
// two-column encoding of the relative camera rotation.
struct FrameFeatures {
  Eigen::Vector3d bbox = Eigen::Vector3d::Zero();  // cx, cy, size (normalized)
  Eigen::MatrixXd keypoints;                       // K x 3
  Eigen::VectorXd image_feature;
  Eigen::Matrix<double, 6, 1> cam_rot = Eigen::Matrix<double, 6, 1>::Zero();
};

struct TokenSequence {
  Eigen::MatrixXd tokens;       // model_dim x T, one column per frame
  std::vector<int> positions;   // temporal indices p^t

  int length() const { return static_cast<int>(tokens.cols()); }
};

struct MlpTrace {
  Eigen::MatrixXd input, pre, act;
};

struct LayerTrace {
  Eigen::MatrixXd input;
  Eigen::MatrixXd ln1_hat, ln1_out;
  Eigen::VectorXd ln1_inv_std;
  Eigen::MatrixXd q, k, v, q_rot, k_rot;
  std::vector<Eigen::MatrixXd> probs;  // per head, T x T
  Eigen::MatrixXd attn_concat, attn_out, mid;
  Eigen::MatrixXd ln2_hat, ln2_out;
  Eigen::VectorXd ln2_inv_std;
  Eigen::MatrixXd mlp_pre, mlp_act;
  Eigen::MatrixXd output;
};

struct ForwardTrace {
  std::array<MlpTrace, kFeatureGroupCount> fusion;
  Eigen::MatrixXd tokens;
  std::vector<int> positions;
  std::vector<LayerTrace> layers;
  Eigen::MatrixXd encoded;
  std::array<MlpTrace, kTaskCount> heads;
};

// Raw per-task head outputs, one column per frame. Rotation-valued tasks use
// the 6D encoding and decode through decode_rotation_6d.
struct MultiTaskOutput {
  std::array<Eigen::MatrixXd, kTaskCount> raw;

  const Eigen::MatrixXd& of(Task t) const { return raw[static_cast<std::size_t>(t)]; }
  Eigen::MatrixXd& of(Task t) { return raw[static_cast<std::size_t>(t)]; }

  Rotation gamma_c(int frame) const;
  Rotation gamma_gv(int frame) const;
  Vec3 v_root(int frame) const;
  double stationary_prob(int frame, int joint) const;
};

// Per-group MLPs to model_dim, summed element-wise into per-frame tokens.
TokenSequence early_fuse(const ModelConfig& config, const ModelParams& params,
                         std::span<const FrameFeatures> features, ForwardTrace* trace = nullptr);

// Rotary frequencies for one head: base^(-2k/dim) for pair index k.
std::vector<double> rope_frequencies(int head_dim, double base);

// Rotates consecutive pairs of `v` by position * freqs[k]. Throws
// OddDimension when the vector length is odd.
Eigen::VectorXd rope_pair_rotate(const Eigen::VectorXd& v, int position,
                                 std::span<const double> freqs);

// Attention logits for one head: queries and keys are rotated by their own
// positions so the dot product only sees the relative offset; scaled by
// 1/sqrt(head_dim). No mask applied.
Eigen::MatrixXd attention_logits(const ModelConfig& config, const AttentionParams& attn,
                                 const Eigen::MatrixXd& q_tokens, const Eigen::MatrixXd& k_tokens,
                                 std::span<const int> positions, int head);

// Full multi-head self-attention with the band mask: token t attends to s iff
// -L < t - s < L. Returns the output-projected result (no residual).
Eigen::MatrixXd masked_self_attention(const ModelConfig& config, const AttentionParams& attn,
                                      const Eigen::MatrixXd& tokens,
                                      std::span<const int> positions, int band_limit,
                                      LayerTrace* trace = nullptr);

// Pre-norm encoder stack over the token sequence.
Eigen::MatrixXd transformer_forward(const ModelConfig& config, const ModelParams& params,
                                    const TokenSequence& tokens, ForwardTrace* trace = nullptr);

// Per-task two-layer MLPs over the encoded tokens.
MultiTaskOutput multitask_heads(const ModelConfig& config, const ModelParams& params,
                                const Eigen::MatrixXd& encoded, ForwardTrace* trace = nullptr);

// features -> tokens -> transformer -> heads.
MultiTaskOutput model_forward(const ModelConfig& config, const ModelParams& params,
                              std::span<const FrameFeatures> features,
                              ForwardTrace* trace = nullptr);

// Gram-Schmidt decode of the continuous 6D rotation encoding (two stacked
// 3-vectors as the first two rotation columns).
Rotation decode_rotation_6d(const Eigen::Matrix<double, 6, 1>& v);
Eigen::Matrix<double, 6, 1> encode_rotation_6d(const Rotation& r);

// Weak-perspective camera (s, tx, ty) on a crop (cx, cy, size b) restored to
// the full-image camera translation:
//   t_z = 2 f / (s b), t_x = tx + 2 (cx - px) / (s b), t_y analogous.
// Throws NonPositiveScale when s, b or f is not positive.
Vec3 restore_full_translation(const Eigen::Vector3d& weak_cam, const Eigen::Vector3d& bbox,
                              const CameraIntrinsics& intrinsics);

// Gradients with respect to the raw head outputs, same shapes as
// MultiTaskOutput::raw.
struct HeadGradients {
  std::array<Eigen::MatrixXd, kTaskCount> d_raw;
};

// Reverse pass through heads, encoder stack and fusion MLPs. Returns
// parameter gradients; optionally also the gradient at the fused tokens.
ModelParams model_backward(const ModelConfig& config, const ModelParams& params,
                           const ForwardTrace& trace, const HeadGradients& d_heads,
                           Eigen::MatrixXd* d_tokens = nullptr);

// Stable integer-weighted checksum used by the demo tool and golden tests.
double tensor_checksum(const Eigen::MatrixXd& m);

// Wraps an axis-angle vector to the equivalent rotation with norm <= pi.
Vec3 wrap_axis_angle(const Vec3& v);

}  // namespace gvm::model

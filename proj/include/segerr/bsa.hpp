#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace segerr::bsa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// y = x * weight + bias (bias broadcast over rows).
struct AffineMap {
  Matrix weight;  // in_dim x out_dim
  Vector bias;    // out_dim
};

/// A stack of affine maps with a pointwise rectifier between layers and none
/// after the last. A single layer is a plain affine map.
struct AffineStack {
  std::vector<AffineMap> layers;

  int input_dim() const;
  int output_dim() const;
};

/// Applies the stack to row-stacked features (rows = tokens).
Matrix apply(const AffineStack& stack, const Matrix& features);

/// Builds a stack from an even list of matrices, alternating weight and bias
/// (bias given as a 1 x out row). This is the layout of the weight container
/// format in FORMATS.md.
AffineStack stack_from_matrices(const std::vector<Matrix>& matrices);

/// Seeded stack for tests and demos: entries uniform in [-1, 1), generated by
/// the library RNG so instances are reproducible.
AffineStack make_random_stack(const std::vector<int>& dims, std::uint64_t seed);

struct AttentionQueues {
  Matrix q, k, v;  // each rows x d_k
};

/// Maps features, then splits the channel axis into three equal contiguous
/// blocks (query, key, value). The map's output width must divide by 3.
AttentionQueues split_queues(const Matrix& features, const AffineStack& map);

/// Single-head fused attention: the boundary and semantic query queues are
/// concatenated along channels, mapped back to d_k by `fuse`, and attended
/// against the semantic keys/values with scale 1/sqrt(d_k).
Matrix fused_attention(const Matrix& boundary_q, const AttentionQueues& semantic,
                       const AffineStack& fuse);

/// Soft dice over row-stochastic scores against one-hot targets:
/// 1 - 2 sum(p.t) / sum(p.p + t.t). In [0, 1]; zero iff pred == target.
double dice_term(const Matrix& pred, const Matrix& target_onehot);

/// Mean cross-entropy plus the dice term. Scores are clamped to
/// [eps, 1 - eps], eps = 1e-7, before logarithms.
double semantic_loss(const Matrix& pred, const Matrix& target_onehot);

/// Mean binary cross-entropy of boundary scores against binary pseudo-labels
/// plus 1 - 2 sum(e * eg) / sum(e + eg). Pseudo-labels must be exactly 0 or 1.
double boundary_loss(const Vector& scores, const Vector& pseudo_labels);

constexpr double kProbEps = 1e-7;

}  // namespace segerr::bsa

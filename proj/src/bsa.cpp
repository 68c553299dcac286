#include "segerr/bsa.hpp"

#include <cmath>
#include <string>

#include "segerr/errors.hpp"
#include "segerr/rng.hpp"

namespace segerr::bsa {

int AffineStack::input_dim() const {
  if (layers.empty()) throw ValidationError("affine stack has no layers");
  return static_cast<int>(layers.front().weight.rows());
}

int AffineStack::output_dim() const {
  if (layers.empty()) throw ValidationError("affine stack has no layers");
  return static_cast<int>(layers.back().weight.cols());
}

Matrix apply(const AffineStack& stack, const Matrix& features) {
  if (stack.layers.empty()) throw ValidationError("affine stack has no layers");
  Matrix x = features;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const AffineMap& layer = stack.layers[l];
    if (layer.weight.rows() != x.cols()) {
      throw ValidationError("affine layer " + std::to_string(l) + " expects " +
                            std::to_string(layer.weight.rows()) +
                            " input channels, got " + std::to_string(x.cols()));
    }
    if (layer.bias.size() != layer.weight.cols()) {
      throw ValidationError("affine layer " + std::to_string(l) +
                            " bias size does not match output width");
    }
    x = (x * layer.weight).rowwise() + layer.bias.transpose();
    if (l + 1 < stack.layers.size()) x = x.cwiseMax(0.0);  // rectifier between layers
  }
  return x;
}

AffineStack stack_from_matrices(const std::vector<Matrix>& matrices) {
  if (matrices.empty() || matrices.size() % 2 != 0) {
    throw ValidationError("weight container must hold alternating weight/bias pairs");
  }
  AffineStack stack;
  for (std::size_t k = 0; k < matrices.size(); k += 2) {
    const Matrix& w = matrices[k];
    const Matrix& b = matrices[k + 1];
    if (b.rows() != 1 || b.cols() != w.cols()) {
      throw ValidationError("bias " + std::to_string(k / 2) +
                            " must be a 1 x out row matching its weight");
    }
    stack.layers.push_back(AffineMap{w, b.row(0).transpose()});
  }
  return stack;
}

AffineStack make_random_stack(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw ValidationError("need at least input and output dims");
  Rng rng(seed);
  AffineStack stack;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    AffineMap layer;
    layer.weight.resize(dims[l], dims[l + 1]);
    layer.bias.resize(dims[l + 1]);
    for (int i = 0; i < layer.weight.rows(); ++i) {
      for (int j = 0; j < layer.weight.cols(); ++j) {
        layer.weight(i, j) = rng.uniform(-1.0, 1.0);
      }
    }
    for (int j = 0; j < layer.bias.size(); ++j) layer.bias(j) = rng.uniform(-1.0, 1.0);
    stack.layers.push_back(std::move(layer));
  }
  return stack;
}

AttentionQueues split_queues(const Matrix& features, const AffineStack& map) {
  const Matrix mapped = apply(map, features);
  const Eigen::Index width = mapped.cols();
  if (width % 3 != 0) {
    throw ValidationError("queue map output width " + std::to_string(width) +
                          " is not divisible by 3");
  }
  const Eigen::Index dk = width / 3;
  AttentionQueues queues;
  queues.q = mapped.leftCols(dk);
  queues.k = mapped.middleCols(dk, dk);
  queues.v = mapped.rightCols(dk);
  return queues;
}

Matrix fused_attention(const Matrix& boundary_q, const AttentionQueues& semantic,
                       const AffineStack& fuse) {
  const Eigen::Index n = boundary_q.rows();
  const Eigen::Index dk = boundary_q.cols();
  if (semantic.q.rows() != n || semantic.k.rows() != n || semantic.v.rows() != n ||
      semantic.q.cols() != dk || semantic.k.cols() != dk || semantic.v.cols() != dk) {
    throw ValidationError("attention queues must all be N x d_k");
  }
  if (fuse.input_dim() != 2 * dk || fuse.output_dim() != dk) {
    throw ValidationError("fusion map must take 2*d_k channels to d_k");
  }

  Matrix concat(n, 2 * dk);
  concat.leftCols(dk) = boundary_q;
  concat.rightCols(dk) = semantic.q;
  const Matrix fused_q = apply(fuse, concat);

  Matrix logits = fused_q * semantic.k.transpose() / std::sqrt(static_cast<double>(dk));
  // numerically stable row-wise softmax
  for (Eigen::Index i = 0; i < n; ++i) {
    const double peak = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - peak).exp();
    logits.row(i) = e / e.sum();
  }
  return logits * semantic.v;
}

namespace {

void check_score_target(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ValidationError("scores and targets must have identical shapes");
  }
  if (pred.rows() == 0 || pred.cols() == 0) {
    throw ValidationError("scores must be non-empty");
  }
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < pred.cols(); ++j) {
      const double p = pred(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("score outside [0, 1] at row " + std::to_string(i));
      }
      const double t = target(i, j);
      if (t == 1.0) {
        ++ones;
      } else if (t != 0.0) {
        throw ValidationError("target row " + std::to_string(i) + " is not one-hot");
      }
    }
    if (ones != 1) {
      throw ValidationError("target row " + std::to_string(i) + " is not one-hot");
    }
  }
}

double clamp_prob(double p) {
  return std::min(1.0 - kProbEps, std::max(kProbEps, p));
}

}  // namespace

double dice_term(const Matrix& pred, const Matrix& target_onehot) {
  check_score_target(pred, target_onehot);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    num += pred.row(i).dot(target_onehot.row(i));
    den += pred.row(i).squaredNorm() + target_onehot.row(i).squaredNorm();
  }
  return 1.0 - 2.0 * num / den;  // den >= N since targets are one-hot
}

double semantic_loss(const Matrix& pred, const Matrix& target_onehot) {
  check_score_target(pred, target_onehot);
  double ce = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    ce += -std::log(clamp_prob(pred.row(i).dot(target_onehot.row(i))));
  }
  return ce / static_cast<double>(pred.rows()) + dice_term(pred, target_onehot);
}

double boundary_loss(const Vector& scores, const Vector& pseudo_labels) {
  if (scores.size() != pseudo_labels.size()) {
    throw ValidationError("scores and pseudo-labels must have equal length");
  }
  if (scores.size() == 0) throw ValidationError("scores must be non-empty");
  double bce = 0.0;
  double dice_num = 0.0;
  double dice_den = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double e = scores(i);
    const double eg = pseudo_labels(i);
    if (!(e >= 0.0 && e <= 1.0)) {
      throw ValidationError("boundary score outside [0, 1] at index " + std::to_string(i));
    }
    if (eg != 0.0 && eg != 1.0) {
      throw ValidationError("boundary pseudo-label at index " + std::to_string(i) +
                            " is not binary");
    }
    const double ec = clamp_prob(e);
    bce += -(eg * std::log(ec) + (1.0 - eg) * std::log(1.0 - ec));
    dice_num += e * eg;
    dice_den += e + eg;
  }
  const double dice = dice_den > 0.0 ? 1.0 - 2.0 * dice_num / dice_den : 0.0;
  return bce / static_cast<double>(scores.size()) + dice;
}

}  // namespace segerr::bsa

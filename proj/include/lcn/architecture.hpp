#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lcn/errors.hpp"

namespace lcn {

// Shape of a linear convolutional network: layer dimensions d_0..d_N,
// filter widths k_1..k_N and strides s_1..s_N with
// d_i = (d_{i-1} - k_i)/s_i + 1 holding exactly in integers.
class Architecture {
 public:
  // Derives all dims from (d0, widths, strides) and validates the
  // dimension relation layer by layer.
  static Architecture create(int d0, std::vector<int> widths,
                             std::vector<int> strides);

  int depth() const { return static_cast<int>(widths_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<int>& widths() const { return widths_; }
  const std::vector<int>& strides() const { return strides_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  // Total parameter count across all layers.
  int total_params() const;

  // Width k_v and stride s_v of the composed convolution.
  int final_width() const;
  long final_stride() const;

  // Product of strides of layers 1..i-1 (1-based layer index i);
  // the exponent step of layer i's associated polynomial.
  long stride_prefix(int layer) const;

  // True iff all strides are 1 and at most one width is even
  // (a sufficient condition for the architecture to be filling).
  bool is_filling_candidate() const;

 private:
  Architecture() = default;
  std::vector<int> dims_;
  std::vector<int> widths_;
  std::vector<int> strides_;
};

// The optimization variable: one filter vector per layer.
struct FilterStack {
  std::vector<Eigen::VectorXd> filters;

  int depth() const { return static_cast<int>(filters.size()); }

  // Throws ShapeMismatch unless filter lengths match arch's widths.
  void check_shape(const Architecture& arch) const;

  Eigen::VectorXd flatten() const;
  static FilterStack from_flat(const Architecture& arch,
                               const Eigen::VectorXd& flat);
};

}  // namespace lcn

#include "lcn/architecture.hpp"

#include <string>

namespace lcn {

Architecture Architecture::create(int d0, std::vector<int> widths,
                                  std::vector<int> strides) {
  if (widths.empty() || widths.size() != strides.size())
    fail(ErrorCode::ShapeMismatch,
         "widths and strides must have the same length N >= 1");
  if (d0 < 1) fail(ErrorCode::NonPositiveDimension, "d0 must be >= 1");

  Architecture arch;
  arch.dims_.push_back(d0);
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const int k = widths[i], s = strides[i];
    const int d_prev = arch.dims_.back();
    if (k < 1 || s < 1)
      fail(ErrorCode::NonPositiveDimension,
           "widths and strides must be >= 1 (layer " + std::to_string(i + 1) +
               ")");
    if (k > d_prev)
      fail(ErrorCode::FilterTooWide,
           "filter width " + std::to_string(k) + " exceeds input dimension " +
               std::to_string(d_prev) + " at layer " + std::to_string(i + 1));
    if ((d_prev - k) % s != 0)
      fail(ErrorCode::NonIntegerDimension,
           "(d_{i-1} - k_i) not divisible by s_i at layer " +
               std::to_string(i + 1));
    const int d = (d_prev - k) / s + 1;
    if (d < 1)
      fail(ErrorCode::NonPositiveDimension,
           "derived dimension < 1 at layer " + std::to_string(i + 1));
    arch.dims_.push_back(d);
  }
  arch.widths_ = std::move(widths);
  arch.strides_ = std::move(strides);
  return arch;
}

int Architecture::total_params() const {
  int total = 0;
  for (int k : widths_) total += k;
  return total;
}

long Architecture::stride_prefix(int layer) const {
  if (layer < 1 || layer > depth())
    fail(ErrorCode::IndexOutOfRange,
         "layer index " + std::to_string(layer) + " out of range");
  long prod = 1;
  for (int n = 0; n < layer - 1; ++n) prod *= strides_[n];
  return prod;
}

int Architecture::final_width() const {
  long kv = widths_[0];
  for (int i = 2; i <= depth(); ++i)
    kv += static_cast<long>(widths_[i - 1] - 1) * stride_prefix(i);
  return static_cast<int>(kv);
}

long Architecture::final_stride() const {
  long prod = 1;
  for (int s : strides_) prod *= s;
  return prod;
}

bool Architecture::is_filling_candidate() const {
  int even = 0;
  for (int s : strides_)
    if (s != 1) return false;
  for (int k : widths_)
    if (k % 2 == 0) ++even;
  return even <= 1;
}

void FilterStack::check_shape(const Architecture& arch) const {
  if (depth() != arch.depth())
    fail(ErrorCode::ShapeMismatch, "filter stack depth does not match");
  for (int i = 0; i < depth(); ++i)
    if (filters[i].size() != arch.widths()[i])
      fail(ErrorCode::ShapeMismatch,
           "filter length mismatch at layer " + std::to_string(i + 1));
}

Eigen::VectorXd FilterStack::flatten() const {
  Eigen::Index total = 0;
  for (const auto& f : filters) total += f.size();
  Eigen::VectorXd out(total);
  Eigen::Index pos = 0;
  for (const auto& f : filters) {
    out.segment(pos, f.size()) = f;
    pos += f.size();
  }
  return out;
}

FilterStack FilterStack::from_flat(const Architecture& arch,
                                   const Eigen::VectorXd& flat) {
  if (flat.size() != arch.total_params())
    fail(ErrorCode::ShapeMismatch, "flat vector length does not match");
  FilterStack w;
  Eigen::Index pos = 0;
  for (int k : arch.widths()) {
    w.filters.push_back(flat.segment(pos, k));
    pos += k;
  }
  return w;
}

}  // namespace lcn

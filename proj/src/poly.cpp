#include "lcn/poly.hpp"

namespace lcn {

RealPoly from_filter(const Eigen::VectorXd& w) {
  if (w.size() == 0) fail(ErrorCode::EmptyFilter, "empty filter");
  RealPoly p;
  p.coeffs.assign(w.data(), w.data() + w.size());
  return p;
}

RealPoly stretch(const Eigen::VectorXd& w, int layer,
                 const std::vector<int>& strides) {
  if (w.size() == 0) fail(ErrorCode::EmptyFilter, "empty filter");
  if (layer < 1 || layer > static_cast<int>(strides.size()))
    fail(ErrorCode::IndexOutOfRange, "layer index out of range");
  long step = 1;
  for (int n = 0; n < layer - 1; ++n) step *= strides[n];
  RealPoly p;
  p.coeffs.assign(static_cast<std::size_t>((w.size() - 1) * step + 1), 0.0);
  for (Eigen::Index j = 0; j < w.size(); ++j) p.coeffs[j * step] = w(j);
  return p;
}

}  // namespace lcn

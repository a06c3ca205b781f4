#include "lcn/conv.hpp"

#include <string>

namespace lcn {

Eigen::MatrixXd ConvMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int j = 0; j < rows; ++j)
    for (int n = 0; n < filter.size(); ++n)
      m(j, j * stride + n) = filter(n);
  return m;
}

ConvMatrix to_matrix(const Eigen::VectorXd& filter, int d_in, long stride) {
  const int k = static_cast<int>(filter.size());
  if (k < 1) fail(ErrorCode::EmptyFilter, "empty filter");
  if (stride < 1) fail(ErrorCode::NonPositiveDimension, "stride must be >= 1");
  if (k > d_in)
    fail(ErrorCode::FilterTooWide, "filter width " + std::to_string(k) +
                                       " exceeds d_in " + std::to_string(d_in));
  if ((d_in - k) % stride != 0)
    fail(ErrorCode::NonIntegerDimension, "(d_in - k) not divisible by stride");
  ConvMatrix cm;
  cm.filter = filter;
  cm.stride = stride;
  cm.cols = d_in;
  cm.rows = static_cast<int>((d_in - k) / stride + 1);
  return cm;
}

FinalFilter final_filter(const Architecture& arch, const FilterStack& w) {
  w.check_shape(arch);
  Eigen::VectorXd v = w.filters[0];
  long sprod = arch.strides()[0];
  for (int i = 2; i <= arch.depth(); ++i) {
    const Eigen::VectorXd& wi = w.filters[i - 1];
    const long step = sprod;  // product of strides of layers < i
    const Eigen::Index len = (wi.size() - 1) * step + v.size();
    Eigen::VectorXd nv = Eigen::VectorXd::Zero(len);
    for (Eigen::Index n = 0; n < wi.size(); ++n)
      for (Eigen::Index l = 0; l < v.size(); ++l)
        nv(n * step + l) += wi(n) * v(l);
    v = std::move(nv);
    sprod *= arch.strides()[i - 1];
  }
  FinalFilter out;
  out.coeffs = std::move(v);
  out.stride = arch.final_stride();
  return out;
}

ConvMatrix network_matrix(const Architecture& arch, const FilterStack& w) {
  FinalFilter v = final_filter(arch, w);
  ConvMatrix cm;
  cm.filter = std::move(v.coeffs);
  cm.stride = v.stride;
  cm.rows = arch.output_dim();
  cm.cols = arch.input_dim();
  return cm;
}

Eigen::MatrixXd network_dense(const Architecture& arch, const FilterStack& w) {
  w.check_shape(arch);
  Eigen::MatrixXd prod = to_matrix(w.filters[0], arch.dims()[0],
                                   arch.strides()[0])
                             .dense();
  for (int i = 2; i <= arch.depth(); ++i) {
    Eigen::MatrixXd wi =
        to_matrix(w.filters[i - 1], arch.dims()[i - 1], arch.strides()[i - 1])
            .dense();
    prod = wi * prod;
  }
  return prod;
}

}  // namespace lcn

#include "lcn/flow.hpp"
#include "lcn/roots.hpp"

namespace lcn {

LimitClassification classify_limit(const LossSpec& spec,
                                   const Architecture& arch,
                                   const FilterStack& w_final,
                                   const Dataset& data, double tol) {
  (void)spec;  // all supported loss families are convex in the output
  LimitClassification out;
  out.grad_norm = risk_grad(spec, arch, w_final, data).flatten().norm();
  if (out.grad_norm > tol) {
    out.status = LimitStatus::NotCritical;
    out.note = "gradient norm above tolerance";
    return out;
  }

  for (int s : arch.strides())
    if (s != 1) {
      out.status = LimitStatus::NoCertificate;
      out.note = "criterion only stated for unit strides";
      return out;
    }

  // Single layer: the common-root condition across distinct factors is
  // vacuous; report the point as certified.
  if (arch.depth() == 1) {
    out.status = LimitStatus::GlobalMinCertificate;
    out.note = "single layer, criterion vacuous";
    return out;
  }

  std::vector<RealPoly> polys;
  for (int i = 1; i <= arch.depth(); ++i) {
    RealPoly p = stretch(w_final.filters[i - 1], i, arch.strides());
    if (p.is_zero(1e-14 * std::max(1.0, norm1(p)))) {
      out.status = LimitStatus::NoCertificate;
      out.note = "zero layer polynomial at layer " + std::to_string(i);
      return out;
    }
    polys.push_back(std::move(p));
  }

  out.witnesses = common_roots(polys, 1e-7);
  if (out.witnesses.empty()) {
    out.status = LimitStatus::GlobalMinCertificate;
    out.note = "no common roots at tolerance 1e-7";
  } else {
    out.status = LimitStatus::NoCertificate;
    out.note = "layer polynomials share roots";
  }
  return out;
}

}  // namespace lcn

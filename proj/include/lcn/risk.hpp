#pragma once

#include "lcn/conv.hpp"
#include "lcn/data.hpp"
#include "lcn/loss.hpp"

namespace lcn {

// Sum over samples of the loss at the network output.
double empirical_risk(const LossSpec& spec, const Architecture& arch,
                      const FilterStack& w, const Dataset& data);

// Exact gradient of the empirical risk with respect to every filter entry,
// via cached left/right partial products of the layer matrices.
FilterStack risk_grad(const LossSpec& spec, const Architecture& arch,
                      const FilterStack& w, const Dataset& data);

}  // namespace lcn

#pragma once

#include <functional>
#include <string>

#include "apspec/common.hpp"
#include "apspec/point.hpp"

namespace apspec {

// A continuous complex-valued function on the phase space, with a recorded
// sup-norm bound.
struct Observable {
    std::string name;
    std::function<cplx(const SystemPoint&)> eval;
    double sup_norm = 1.0;

    cplx operator()(const SystemPoint& x) const { return eval(x); }
};

} // namespace apspec

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace vf {

struct Rule
{
    std::vector<double> x;
    std::vector<double> w;
};

//! n-point Gauss-Legendre rule on [a, b]
Rule gauss_legendre(int n, double a, double b);

}  // namespace vf

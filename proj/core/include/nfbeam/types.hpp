#pragma once

#include <complex>
#include <vector>

namespace nfbeam {

using cdouble = std::complex<double>;
using CVector = std::vector<cdouble>;
using RVector = std::vector<double>;

}  // namespace nfbeam

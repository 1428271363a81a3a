#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace vffrls {

using Index = Eigen::Index;
using Cx = std::complex<double>;

template <typename Scalar> using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar> using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar> using RealOf = typename Eigen::NumTraits<Scalar>::Real;

using CxVector = Vector<Cx>;
using CxMatrix = Matrix<Cx>;
using RealVector = Vector<double>;
using RealMatrix = Matrix<double>;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace vffrls

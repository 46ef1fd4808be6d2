#pragma once

#include <complex>

#include <Eigen/Dense>

namespace theta_secant {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

// Absolute floor used by every relative comparison.
inline constexpr double kResidualFloor = 1e-300;

}  // namespace theta_secant

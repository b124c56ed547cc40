#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace dfsctl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Malformed documents, bad parameters, violated preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// No protective inputs exist for the requested projection and control set.
class NotInvariant : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Decompositions that fail to separate cleanly at the configured tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double herm = 1e-10;       // relative, scaled by max(1, ||X||_F)
    double rank = 1e-9;        // singular values <= rank * sigma_max are zero
    double cluster = 1e-6;     // eigenvalue gap for sector clustering
    double closure = 1e-8;     // relative residual for a bracket to count as new
    double intersect = 1e-8;   // cosines >= 1 - intersect are common directions
    double invariance = 1e-9;  // leakage residuals
    double ode_rtol = 1e-9;
    double ode_atol = 1e-12;

    // NAME=VALUE override, NAME one of the fields above
    void set(const std::string& name, double value);
};

}  // namespace dfsctl

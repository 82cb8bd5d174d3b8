#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace risradar {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

inline double degToRad(double deg) { return deg * kPi / 180.0; }
inline double dbToLinear(double db) { return std::pow(10.0, db / 10.0); }
inline double linearToDb(double lin) { return 10.0 * std::log10(lin); }

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// A retraction hit an element with |v_m + xi_m| ~ 0.
class ZeroElementError : public Error {
public:
  using Error::Error;
};

/// A solver failed to decrease its objective beyond the allowed slack.
class MonotonicityViolation : public Error {
public:
  using Error::Error;
};

class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace risradar

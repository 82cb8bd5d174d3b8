#include "risradar/manifold.hpp"

#include <cmath>
#include <sstream>

namespace risradar {

CcmPoint::CcmPoint(CVec v) : v_(std::move(v)) {
  const double err = maxModulusError();
  if (!(err <= kDriftTolerance)) {
    std::ostringstream msg;
    msg << "point is not unimodular (max | |v_m| - 1 | = " << err << ")";
    throw ConfigError(msg.str());
  }
  if (err > kStrictTolerance) {
    for (auto &x : v_) {
      x /= std::abs(x);
    }
  }
}

CcmPoint CcmPoint::ones(int m) { return CcmPoint(CVec::Ones(m)); }

CcmPoint CcmPoint::normalize(const CVec &x) {
  CVec out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double mag = std::abs(x[k]);
    if (mag < 1e-15) {
      std::ostringstream msg;
      msg << "element " << k << " has modulus " << mag
          << "; cannot project onto the unit circle";
      throw ZeroElementError(msg.str());
    }
    out[k] = x[k] / mag;
  }
  CcmPoint p;
  p.v_ = std::move(out);
  return p;
}

double CcmPoint::maxModulusError() const {
  double err = 0.0;
  for (const auto &x : v_) {
    err = std::max(err, std::abs(std::abs(x) - 1.0));
  }
  return err;
}

CVec projectTangent(const CVec &v, const CVec &y) {
  if (v.size() != y.size()) {
    throw DimensionError("projectTangent: size mismatch");
  }
  CVec out(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    out[k] = y[k] - (y[k] * std::conj(v[k])).real() * v[k];
  }
  return out;
}

double tangencyResidual(const CVec &v, const CVec &xi) {
  double res = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    res = std::max(res, std::abs((xi[k] * std::conj(v[k])).real()));
  }
  return res;
}

CcmPoint retract(const CcmPoint &p, const CVec &xi) {
  if (xi.size() != p.size()) {
    throw DimensionError("retract: size mismatch");
  }
  return CcmPoint::normalize(p.vec() + xi);
}

RVec tangentCoordinates(const CVec &v, const CVec &xi) {
  RVec c(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    c[k] = (std::conj(v[k]) * xi[k]).imag();
  }
  return c;
}

CVec fromTangentCoordinates(const CVec &v, const RVec &c) {
  CVec xi(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    xi[k] = Complex(0.0, c[k]) * v[k];
  }
  return xi;
}

RVec toReal(const CVec &x) {
  const auto m = x.size();
  RVec out(2 * m);
  out.head(m) = x.real();
  out.tail(m) = x.imag();
  return out;
}

CVec fromReal(const RVec &x) {
  if (x.size() % 2 != 0) {
    throw DimensionError("fromReal: odd length");
  }
  const auto m = x.size() / 2;
  CVec out(m);
  out.real() = x.head(m);
  out.imag() = x.tail(m);
  return out;
}

RMat embedMatrix(const CMat &h) {
  const auto m = h.rows();
  const auto n = h.cols();
  RMat out(2 * m, 2 * n);
  out.topLeftCorner(m, n) = h.real();
  out.topRightCorner(m, n) = -h.imag();
  out.bottomLeftCorner(m, n) = h.imag();
  out.bottomRightCorner(m, n) = h.real();
  return out;
}

RMat embedDiagonal(const RVec &q) {
  const auto m = q.size();
  RMat out = RMat::Zero(2 * m, 2 * m);
  out.diagonal().head(m) = q;
  out.diagonal().tail(m) = q;
  return out;
}

RMat reflectionMatrix(const CVec &v) {
  const auto m = v.size();
  RMat out = RMat::Zero(2 * m, 2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Complex d = v[k] * v[k];
    out(k, k) = d.real();
    out(k, m + k) = d.imag();
    out(m + k, k) = d.imag();
    out(m + k, m + k) = -d.real();
  }
  return out;
}

} // namespace risradar

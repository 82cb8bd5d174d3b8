#pragma once

#include "risradar/types.hpp"

namespace risradar {

/// A point on the complex circle manifold {v in C^M : |v_m| = 1}.
class CcmPoint {
public:
  /// Tolerance on | |v_m| - 1 | accepted as-is at construction.
  static constexpr double kStrictTolerance = 1e-12;
  /// Larger drift up to this bound is renormalized; beyond it, rejected.
  static constexpr double kDriftTolerance = 1e-9;

  CcmPoint() = default;
  /// Throws ConfigError unless every element is unimodular within
  /// kDriftTolerance; elements off by more than kStrictTolerance are
  /// renormalized.
  explicit CcmPoint(CVec v);

  /// All-ones point of dimension m.
  static CcmPoint ones(int m);
  /// Elementwise projection onto the unit circle; throws ZeroElementError on
  /// zero entries.
  static CcmPoint normalize(const CVec &x);

  const CVec &vec() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  double maxModulusError() const;

private:
  CVec v_;
};

/// Orthogonal projection onto T_v: y - Re{y .* conj(v)} .* v.
CVec projectTangent(const CVec &v, const CVec &y);
inline CVec projectTangent(const CcmPoint &p, const CVec &y) {
  return projectTangent(p.vec(), y);
}

/// max_m |Re{xi_m conj(v_m)}|.
double tangencyResidual(const CVec &v, const CVec &xi);

/// Elementwise retraction (v_m + xi_m) / |v_m + xi_m|.
CcmPoint retract(const CcmPoint &p, const CVec &xi);

/// Real inner product Re{x^H y}.
inline double realInner(const CVec &x, const CVec &y) {
  return x.dot(y).real();
}

/// Tangent-space coordinates against the basis {j v_m e_m}: c_m = Im{conj(v_m) xi_m}.
RVec tangentCoordinates(const CVec &v, const CVec &xi);
/// Inverse of tangentCoordinates: xi = j v .* c.
CVec fromTangentCoordinates(const CVec &v, const RVec &c);

// Real embedding: x -> [Re x; Im x].
RVec toReal(const CVec &x);
CVec fromReal(const RVec &x);

/// [[Re H, -Im H]; [Im H, Re H]], so that toReal(H x) = embedMatrix(H) toReal(x).
RMat embedMatrix(const CMat &h);
/// Blockdiag(Diag(q), Diag(q)) for a real diagonal q.
RMat embedDiagonal(const RVec &q);
/// [[Re D, Im D]; [Im D, -Re D]] with D = Diag(v .* v): the real form of
/// y -> Diag(v .* v) conj(y). An involution when v is unimodular.
RMat reflectionMatrix(const CVec &v);

} // namespace risradar

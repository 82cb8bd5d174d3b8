#pragma once

#include <cstdint>

#include "risradar/codesign.hpp"
#include "risradar/rng.hpp"

namespace testing_support {

using namespace risradar;

inline CVec randomComplex(CounterRng &rng, int n) {
  CVec x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.complexNormal();
  }
  return x;
}

inline CVec randomUnimodular(CounterRng &rng, int n) {
  CVec x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = std::polar(1.0, rng.phase());
  }
  return x;
}

inline CMat randomHermitian(CounterRng &rng, int n) {
  CMat a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      a(i, j) = rng.complexNormal();
    }
  }
  return 0.5 * (a + a.adjoint());
}

inline CVec randomTangent(CounterRng &rng, const CVec &v) {
  return projectTangent(v, randomComplex(rng, static_cast<int>(v.size())));
}

/// Random channel terms: target plus `interferers` interference directions.
inline ChannelTerms randomTerms(CounterRng &rng, int m, int interferers) {
  ChannelTerms t;
  for (int i = 0; i <= interferers; ++i) {
    t.h.push_back(randomComplex(rng, m));
    t.beta.push_back(rng.complexNormal());
    t.powers.push_back(i == 0 ? 10.0 : 100.0 * rng.uniform());
  }
  t.noise_term = 1.0 + rng.uniform();
  return t;
}

/// A UQP built from random terms at z = E(random v).
inline UqpProblem randomProblem(CounterRng &rng, int m, int interferers) {
  const ChannelTerms t = randomTerms(rng, m, interferers);
  return buildUqp(t, dinkelbachZ(t, randomUnimodular(rng, m)));
}

/// The first v-subproblem of a default-style scene.
struct SceneProblem {
  Scene scene;
  ChannelMatrix g;
  BeamformerState state;
  ChannelTerms terms;
  UqpProblem problem;
};

inline SceneProblem sceneProblem(int m, int interferers, std::uint64_t seed) {
  SceneProblem sp;
  sp.scene = defaultScene(m, interferers);
  sp.g = drawChannel(sp.scene.channel, sp.scene.geometry, seed);
  sp.state = initialState(sp.scene, sp.g, CodesignConfig{});
  sp.terms = buildChannelTerms(sp.scene, sp.g, sp.state.u, sp.state.w);
  sp.problem = buildUqp(sp.terms, dinkelbachZ(sp.terms, sp.state.v));
  return sp;
}

inline double relativeError(const CVec &a, const CVec &b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

} // namespace testing_support

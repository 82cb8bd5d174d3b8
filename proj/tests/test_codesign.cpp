#include <gtest/gtest.h>

#include "support.hpp"

using namespace risradar;
using namespace testing_support;

namespace {

Scene tinyScene(int n, int m, const std::vector<double> &angles) {
  Scene s = defaultScene(m, 0);
  s.geometry.n_radar = n;
  for (double a : angles) {
    s.interferences.push_back({a, 1000.0});
  }
  return s;
}

BeamformerState randomState(CounterRng &rng, int n, int m) {
  BeamformerState st;
  st.u = randomComplex(rng, n).normalized();
  st.v = randomUnimodular(rng, m);
  st.w = randomComplex(rng, n);
  return st;
}

double collinearity(const CVec &a, const CVec &b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

void expectNonDecreasing(const std::vector<double> &seq, double rel) {
  for (std::size_t k = 1; k < seq.size(); ++k) {
    EXPECT_GE(seq[k], seq[k - 1] - rel * std::abs(seq[k - 1])) << "step " << k;
  }
}

} // namespace

TEST(RisUpdate, DinkelbachSequenceIsMonotone) {
  for (int seed = 0; seed < 5; ++seed) {
    const Scene s = defaultScene(32, 3);
    const ChannelMatrix g = drawChannel(s.channel, s.geometry, seed);
    const BeamformerState st = initialState(s, g, {});
    const RisUpdateReport r = optimizeRis(s, g, st, {});
    ASSERT_GE(r.z.size(), 2u);
    for (std::size_t q = 1; q < r.z.size(); ++q) {
      EXPECT_GE(r.z[q], r.z[q - 1] - 1e-10 * std::max(1.0, r.z[q - 1]));
    }
    const ChannelTerms t = buildChannelTerms(s, g, st.u, st.w);
    EXPECT_NEAR(r.z.back(), dinkelbachZ(t, r.v.vec()), 1e-10 * r.z.back());
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.inner_iterations.size(), r.z.size() - 1);
  }
}

TEST(RisUpdate, NoInterferenceScene) {
  const Scene s = defaultScene(16, 0);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 3);
  const BeamformerState st = initialState(s, g, {});
  const RisUpdateReport r = optimizeRis(s, g, st, {});
  const ChannelTerms t = buildChannelTerms(s, g, st.u, st.w);
  const CVec v = r.v.vec();
  const double expected =
      std::norm(t.h[0].dot(v) + t.beta[0]) / (s.noise_power * st.w.squaredNorm());
  EXPECT_NEAR(r.z.back(), expected, 1e-10 * expected);
  EXPECT_TRUE(r.converged);
}

TEST(RisUpdate, EverySolverImprovesTheRatio) {
  const Scene s = defaultScene(24, 2);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 4);
  const BeamformerState st = initialState(s, g, {});
  for (UqpSolver solver : {UqpSolver::Rnm, UqpSolver::Rcg, UqpSolver::Rgd}) {
    CodesignConfig cfg;
    cfg.solver = solver;
    const RisUpdateReport r = optimizeRis(s, g, st, cfg);
    EXPECT_GT(r.z.back(), r.z.front()) << toString(solver);
  }
}

TEST(ReceiveUpdate, NoInterferenceIsMatchedFilter) {
  const Scene s = defaultScene(8, 0);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 5);
  CounterRng rng(5);
  const BeamformerState st = randomState(rng, 5, 8);
  const CVec target = composePhi(s, g, st.v, s.target_angle_deg) * st.u;
  const CVec w = updateReceive(s, g, st);
  EXPECT_LT((w - target / s.noise_power).norm(), 1e-12 * w.norm());
}

TEST(ReceiveUpdate, LocallyOptimal) {
  const Scene s = defaultScene(32, 5);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 6);
  CounterRng rng(6);
  BeamformerState st = randomState(rng, 5, 32);
  st.w = updateReceive(s, g, st);
  const double best = codesignObjective(s, g, st);
  for (int k = 0; k < 200; ++k) {
    BeamformerState trial = st;
    trial.w += 1e-3 * st.w.norm() * randomComplex(rng, 5);
    EXPECT_LE(codesignObjective(s, g, trial), best * (1.0 + 1e-12));
  }
}

TEST(ReceiveUpdate, GeneralizedEigenvector) {
  const Scene s = tinyScene(2, 3, {-40.0});
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 7);
  CounterRng rng(7);
  const BeamformerState st = randomState(rng, 2, 3);
  const CVec a = composePhi(s, g, st.v, s.target_angle_deg) * st.u;
  const CVec b = composePhi(s, g, st.v, -40.0) * st.u;
  const CMat num = a * a.adjoint();
  const CMat den = 1000.0 * b * b.adjoint() +
                   s.noise_power * CMat::Identity(2, 2);
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> eig(num, den);
  const CVec top = eig.eigenvectors().col(1);
  EXPECT_GE(collinearity(top, updateReceive(s, g, st)), 1.0 - 1e-10);
}

TEST(TransmitUpdate, NoInterferenceIsMatched) {
  const Scene s = defaultScene(8, 0);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 8);
  CounterRng rng(8);
  const BeamformerState st = randomState(rng, 5, 8);
  const CVec target =
      composePhi(s, g, st.v, s.target_angle_deg).adjoint() * st.w;
  const CVec u = updateTransmit(s, g, st);
  EXPECT_NEAR(u.norm(), 1.0, 1e-14);
  EXPECT_GE(collinearity(u, target), 1.0 - 1e-12);
}

TEST(TransmitUpdate, LocallyOptimalOnSphere) {
  const Scene s = defaultScene(32, 5);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 9);
  CounterRng rng(9);
  BeamformerState st = randomState(rng, 5, 32);
  st.u = updateTransmit(s, g, st);
  const double best = transmitQuotient(s, g, st);
  for (int k = 0; k < 200; ++k) {
    BeamformerState trial = st;
    trial.u = (st.u + 1e-3 * randomComplex(rng, 5)).normalized();
    EXPECT_LE(transmitQuotient(s, g, trial), best * (1.0 + 1e-12));
  }
}

TEST(TransmitUpdate, QuotientPhaseInvariant) {
  const Scene s = defaultScene(16, 3);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 10);
  CounterRng rng(10);
  BeamformerState st = randomState(rng, 5, 16);
  const double q = transmitQuotient(s, g, st);
  st.u *= std::polar(1.0, 1.234);
  EXPECT_NEAR(transmitQuotient(s, g, st), q, 1e-12 * q);
}

TEST(TransmitUpdate, MaximizesObjectiveOverUnitNorm) {
  const Scene s = defaultScene(16, 4);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 11);
  CounterRng rng(11);
  BeamformerState st = randomState(rng, 5, 16);
  const double before = codesignObjective(s, g, st);
  st.u = updateTransmit(s, g, st);
  EXPECT_GE(codesignObjective(s, g, st), before * (1.0 - 1e-12));
}

TEST(Initialization, MatchedAndRandom) {
  const Scene s = defaultScene(16, 2);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 12);
  const BeamformerState st = initialState(s, g, {});
  EXPECT_TRUE(st.v.isApprox(CVec::Ones(16)));
  EXPECT_NEAR(st.u.norm(), 1.0, 1e-14);
  EXPECT_LT((st.w - updateReceive(s, g, st)).norm(), 1e-14 * st.w.norm());

  CodesignConfig cfg;
  cfg.init = InitPolicy::Random;
  cfg.init_seed = 3;
  const BeamformerState r = initialState(s, g, cfg);
  EXPECT_TRUE(r.v == randomPhases(16, 3).vec());
  EXPECT_LT(CcmPoint(r.v).maxModulusError(), 1e-14);
}

TEST(Codesign, MonotoneAcrossSubSteps) {
  for (int seed = 0; seed < 3; ++seed) {
    const Scene s = defaultScene(64, 5);
    const ChannelMatrix g = drawChannel(s.channel, s.geometry, seed);
    const SolveReport r = codesign(s, g, {});
    expectNonDecreasing(r.objectiveSequence(), 1e-9);
    EXPECT_GT(r.finalSinrDb(), r.initial_sinr_db);
    EXPECT_LE(r.iterations.size(), 9u);
    EXPECT_TRUE(r.diagnostics.empty());
  }
}

TEST(Codesign, ReportedSinrMatchesState) {
  const Scene s = defaultScene(32, 3);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 13);
  const SolveReport r = codesign(s, g, {});
  EXPECT_NEAR(r.finalSinrDb(), outputSinrDb(s, g, r.state), 1e-9);
  EXPECT_NEAR(r.iterations.back().objective_after_u,
              codesignObjective(s, g, r.state),
              1e-12 * r.iterations.back().objective_after_u);
  EXPECT_LT(CcmPoint(r.state.v).maxModulusError(), 1e-9);
  EXPECT_NEAR(r.state.u.norm(), 1.0, 1e-12);
}

TEST(Codesign, Reproducible) {
  const Scene s = defaultScene(32, 5);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 14);
  const SolveReport a = codesign(s, g, {});
  const SolveReport b = codesign(s, g, {});
  EXPECT_EQ(a.toCsv(), b.toCsv());
  EXPECT_EQ(a.summaryJson(), b.summaryJson());
  EXPECT_TRUE(a.state.v == b.state.v);
}

TEST(Codesign, RisFreeIsMonotone) {
  const Scene s = defaultScene(128, 5);
  const SolveReport r = codesignRisFree(s, {});
  EXPECT_EQ(r.mode, "free");
  EXPECT_EQ(r.state.v.size(), 0);
  expectNonDecreasing(r.objectiveSequence(), 1e-9);
  for (const auto &it : r.iterations) {
    EXPECT_FALSE(it.ris_updated);
  }
}

TEST(Codesign, ZeroElementSceneMatchesRisFree) {
  Scene s = defaultScene(0, 5);
  ChannelMatrix none;
  none.g.resize(0, 5);
  const SolveReport a = codesign(s, none, {});
  const SolveReport b = codesignRisFree(defaultScene(64, 5), {});
  EXPECT_NEAR(a.finalSinrDb(), b.finalSinrDb(), 1e-9);
}

TEST(Codesign, RandomRisKeepsPhasesFixed) {
  const Scene s = defaultScene(64, 5);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 15);
  const SolveReport r = codesignRandomRis(s, g, {}, 77);
  EXPECT_EQ(r.mode, "rris");
  EXPECT_TRUE(r.state.v == randomPhases(64, 77).vec());
  expectNonDecreasing(r.objectiveSequence(), 1e-9);
}

TEST(Codesign, OptimizedRisBeatsRandomOnAverage) {
  const Scene s = defaultScene(64, 5);
  double ris = 0.0;
  double rris = 0.0;
  for (int seed = 0; seed < 8; ++seed) {
    const ChannelMatrix g = drawChannel(s.channel, s.geometry, seed);
    ris += dbToLinear(codesign(s, g, {}).finalSinrDb());
    rris += dbToLinear(codesignRandomRis(s, g, {}, seed).finalSinrDb());
  }
  EXPECT_GT(ris, rris);
}

TEST(Codesign, PhaseGaugeLeavesObjectiveUnchanged) {
  const Scene s = defaultScene(32, 4);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 16);
  const SolveReport r = codesign(s, g, {});
  BeamformerState st = r.state;
  const double base = codesignObjective(s, g, st);
  st.w *= std::polar(1.0, 0.7);
  st.u *= std::polar(1.0, -2.1);
  EXPECT_NEAR(codesignObjective(s, g, st), base, 1e-12 * base);
}

TEST(Codesign, ConfigValidation) {
  CodesignConfig cfg;
  cfg.p_max = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = CodesignConfig{};
  cfg.delta3 = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  const Scene s = defaultScene(8, 1);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 1);
  cfg = CodesignConfig{};
  cfg.dinkelbach_max = -1;
  EXPECT_THROW(codesign(s, g, cfg), ConfigError);
}

TEST(Codesign, CsvHasOneRowPerIteration) {
  const Scene s = defaultScene(16, 2);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 17);
  const SolveReport r = codesign(s, g, {});
  const std::string csv = r.toCsv();
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(lines, static_cast<long>(r.iterations.size()) + 1);
  EXPECT_EQ(csv.rfind("iteration,objective_after_v", 0), 0u);
}

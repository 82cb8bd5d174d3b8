#include <gtest/gtest.h>

#include <cmath>

#include "risradar/scene.hpp"
#include "support.hpp"

using namespace risradar;
using namespace testing_support;

namespace {

// scalar-loop evaluation of exp(-j 2 pi d k sin(theta))
Complex steeringElement(double spacing, int k, double angle_deg) {
  const double phase = -2.0 * kPi * spacing * k * std::sin(angle_deg * kPi / 180.0);
  return {std::cos(phase), std::sin(phase)};
}

ArrayGeometry geometry(int n, int m) {
  ArrayGeometry g;
  g.n_radar = n;
  g.m_ris = m;
  return g;
}

} // namespace

TEST(Steering, BroadsideIsAllOnes) {
  const CVec b = steeringRis(geometry(5, 3), 0.0);
  ASSERT_EQ(b.size(), 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(std::abs(b[k] - Complex(1.0, 0.0)), 0.0, 1e-15);
  }
}

TEST(Steering, EndfireAlternatesSign) {
  const CVec b = steeringRis(geometry(5, 2), 90.0);
  EXPECT_NEAR(std::abs(b[0] - Complex(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b[1] - Complex(-1.0, 0.0)), 0.0, 1e-15);
}

TEST(Steering, MatchesScalarLoop) {
  const CVec b = steeringRis(geometry(5, 8), 50.0);
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(std::abs(b[k] - steeringElement(0.5, k, 50.0)), 0.0, 1e-14);
  }
  const CVec a = steeringRadar(geometry(7, 8), -33.0);
  for (int k = 0; k < 7; ++k) {
    EXPECT_NEAR(std::abs(a[k] - steeringElement(0.5, k, -33.0)), 0.0, 1e-14);
  }
}

TEST(Steering, UnitModulusEverywhere) {
  for (double angle = -90.0; angle <= 90.0; angle += 7.5) {
    const CVec a = steeringRadar(geometry(9, 4), angle);
    EXPECT_LT((a.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-14);
  }
}

TEST(Steering, RejectsEmptyRis) {
  EXPECT_THROW(steeringRis(geometry(5, 0), 10.0), ConfigError);
}

TEST(PathLoss, ReferenceDistanceGivesReferenceLoss) {
  ChannelParams c;
  c.distance = c.ref_distance;
  EXPECT_DOUBLE_EQ(pathLoss(c), 1e-3);
}

TEST(PathLoss, ZeroExponentGivesReferenceLoss) {
  ChannelParams c;
  c.path_exponent = 0.0;
  c.distance = 17.0;
  EXPECT_DOUBLE_EQ(pathLoss(c), 1e-3);
}

TEST(PathLoss, DefaultDistance) {
  ChannelParams c;
  const long double expected = 1e-3L * std::exp(-2.2L * std::log(3.0L));
  EXPECT_NEAR(pathLoss(c), static_cast<double>(expected), 1e-18);
  EXPECT_NEAR(pathLoss(c), 8.919e-5, 1e-8);
}

TEST(Channel, LargeRicianFactorApproachesLos) {
  ChannelParams c;
  c.rician_k = 1e9;
  const ArrayGeometry geo = geometry(5, 16);
  const ChannelMatrix g = drawChannel(c, geo, 11);
  const CMat los = steeringRis(geo, c.los_arrival_deg) *
                   steeringRadar(geo, c.los_departure_deg).transpose();
  const CMat expected = std::sqrt(pathLoss(c)) * los;
  EXPECT_LT((g.g - expected).norm() / expected.norm(), 1e-4);
}

TEST(Channel, SecondMomentMatchesPathLoss) {
  ChannelParams c;
  const ArrayGeometry geo = geometry(2, 2);
  double sum = 0.0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    sum += std::norm(drawChannel(c, geo, 1000 + t).g(1, 0));
  }
  EXPECT_NEAR(sum / draws / pathLoss(c), 1.0, 0.05);
}

TEST(Channel, SameSeedSameBits) {
  ChannelParams c;
  const ArrayGeometry geo = geometry(5, 32);
  const ChannelMatrix a = drawChannel(c, geo, 42);
  const ChannelMatrix b = drawChannel(c, geo, 42);
  const ChannelMatrix other = drawChannel(c, geo, 43);
  EXPECT_EQ(a.g.rows(), 32);
  EXPECT_EQ(a.g.cols(), 5);
  EXPECT_TRUE(a.g == b.g);
  EXPECT_FALSE(a.g == other.g);
}

TEST(Phi, ZeroChannelIsRisFree) {
  Scene s = defaultScene(6, 0);
  ChannelMatrix g{CMat::Zero(6, 5)};
  CounterRng rng(3);
  const CMat phi = composePhi(s, g, randomUnimodular(rng, 6), 12.0);
  const CVec a = steeringRadar(s.geometry, 12.0);
  EXPECT_LT((phi - a * a.transpose()).norm(), 1e-14);
}

TEST(Phi, NoRisGeometry) {
  Scene s = defaultScene(0, 0);
  ChannelMatrix g{CMat(0, 5)};
  const CMat phi = composePhi(s, g, CVec(0), -40.0);
  const CVec a = steeringRadar(s.geometry, -40.0);
  EXPECT_LT((phi - a * a.transpose()).norm(), 1e-14);
}

TEST(Phi, MatchesElementwiseFormula) {
  Scene s = defaultScene(4, 0);
  s.geometry.n_radar = 3;
  CounterRng rng(5);
  ChannelMatrix g{CMat(4, 3)};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 4; ++i) {
      g.g(i, j) = rng.complexNormal();
    }
  }
  const CVec v = randomUnimodular(rng, 4);
  const double theta = 23.0;
  const CMat phi = composePhi(s, g, v, theta);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      Complex left = steeringElement(0.5, r, theta);
      for (int m = 0; m < 4; ++m) {
        left += g.g(m, r) * v[m] *
                steeringElement(0.5, m, theta + s.ris_offset_deg);
      }
      const Complex expected = left * steeringElement(0.5, c, theta);
      EXPECT_NEAR(std::abs(phi(r, c) - expected), 0.0, 1e-13);
    }
  }
}

TEST(Phi, RisContributionIsLinearInV) {
  Scene s = defaultScene(8, 0);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 9);
  CounterRng rng(8);
  const CVec zero = CVec::Zero(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CVec v1 = randomComplex(rng, 8);
    const CVec v2 = randomComplex(rng, 8);
    const Complex c1 = rng.complexNormal();
    const Complex c2 = rng.complexNormal();
    const CMat base = composePhi(s, g, zero, 15.0);
    const CMat lhs = composePhi(s, g, c1 * v1 + c2 * v2, 15.0) - base;
    const CMat rhs = c1 * (composePhi(s, g, v1, 15.0) - base) +
                     c2 * (composePhi(s, g, v2, 15.0) - base);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * std::max(1.0, rhs.norm()));
  }
}

TEST(Sinr, OrthogonalReceiverGivesZero) {
  Scene s = defaultScene(4, 0);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 1);
  BeamformerState st;
  CounterRng rng(2);
  st.u = randomComplex(rng, 5).normalized();
  st.v = randomUnimodular(rng, 4);
  const CVec target = composePhi(s, g, st.v, s.target_angle_deg) * st.u;
  CVec w = randomComplex(rng, 5);
  w -= target * (target.dot(w) / target.squaredNorm());
  st.w = w;
  EXPECT_NEAR(outputSinr(s, g, st), 0.0, 1e-20);
}

TEST(Sinr, ReceiverScaleInvariant) {
  Scene s = defaultScene(16, 5);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 4);
  CounterRng rng(4);
  BeamformerState st;
  st.u = randomComplex(rng, 5).normalized();
  st.v = randomUnimodular(rng, 16);
  st.w = randomComplex(rng, 5);
  const double base = outputSinr(s, g, st);
  st.w *= Complex(-3.7, 0.4);
  EXPECT_NEAR(outputSinr(s, g, st) / base, 1.0, 1e-12);
}

TEST(Sinr, TwoElementHandExpansion) {
  Scene s = defaultScene(0, 0);
  s.geometry.n_radar = 2;
  s.interferences = {{-20.0, 50.0}};
  s.target_power = 4.0;
  s.noise_power = 1.5;
  ChannelMatrix g{CMat(0, 2)};
  BeamformerState st;
  st.u = CVec(2);
  st.u << Complex(0.6, 0.0), Complex(0.0, 0.8);
  st.w = CVec(2);
  st.w << Complex(1.0, -0.5), Complex(0.3, 0.2);
  st.v = CVec(0);

  auto gain = [&](double deg) {
    const Complex e0 = steeringElement(0.5, 0, deg);
    const Complex e1 = steeringElement(0.5, 1, deg);
    const Complex au = e0 * st.u[0] + e1 * st.u[1];
    const Complex wa = std::conj(st.w[0]) * e0 + std::conj(st.w[1]) * e1;
    return std::norm(wa * au);
  };
  const double expected =
      4.0 * gain(30.0) /
      (50.0 * gain(-20.0) + 1.5 * (std::norm(st.w[0]) + std::norm(st.w[1])));
  EXPECT_NEAR(outputSinr(s, g, st), expected, 1e-13 * expected);
}

TEST(Sinr, HomogeneousInPowers) {
  Scene s = defaultScene(8, 3);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 6);
  CounterRng rng(6);
  BeamformerState st{randomComplex(rng, 5).normalized(),
                     randomUnimodular(rng, 8), randomComplex(rng, 5)};
  const double base = outputSinr(s, g, st);
  Scene scaled = s;
  scaled.target_power *= 37.0;
  scaled.noise_power *= 37.0;
  for (auto &itf : scaled.interferences) {
    itf.power *= 37.0;
  }
  EXPECT_NEAR(outputSinr(scaled, g, st) / base, 1.0, 1e-10);
}

TEST(Sinr, RejectsZeroReceiver) {
  Scene s = defaultScene(4, 1);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 1);
  BeamformerState st{CVec::Ones(5) / std::sqrt(5.0), CVec::Ones(4),
                     CVec::Zero(5)};
  EXPECT_THROW(outputSinr(s, g, st), Error);
}

TEST(Beampattern, MatchedRisFreePeaksAtTarget) {
  Scene s = defaultScene(0, 0);
  ChannelMatrix g{CMat(0, 5)};
  const CVec a = steeringRadar(s.geometry, s.target_angle_deg);
  BeamformerState st{a.conjugate() / std::sqrt(5.0), CVec(0),
                     a / std::sqrt(5.0)};
  std::vector<double> grid;
  for (int k = -900; k <= 900; ++k) {
    grid.push_back(0.1 * k);
  }
  const auto pattern = beampattern(s, g, st, grid);
  auto peak = std::max_element(
      pattern.begin(), pattern.end(),
      [](const auto &x, const auto &y) { return x.second < y.second; });
  EXPECT_NEAR(peak->first, s.target_angle_deg, 1e-9);
}

TEST(Beampattern, OneAngleOneValue) {
  Scene s = defaultScene(8, 2);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 1);
  const BeamformerState st = initialState(s, g, CodesignConfig{});
  EXPECT_EQ(beampattern(s, g, st, {12.5}).size(), 1u);
}

TEST(Beampattern, TargetAboveInterferersAfterCodesign) {
  const Scene s = defaultScene(32, 5);
  const ChannelMatrix g = drawChannel(s.channel, s.geometry, 2);
  const SolveReport r = codesign(s, g, CodesignConfig{});
  std::vector<double> grid{s.target_angle_deg};
  for (const auto &itf : s.interferences) {
    grid.push_back(itf.angle_deg);
  }
  const auto pattern = beampattern(s, g, r.state, grid);
  for (std::size_t k = 1; k < pattern.size(); ++k) {
    EXPECT_GT(pattern[0].second, pattern[k].second);
  }
}

TEST(SceneDefaults, ReferenceValues) {
  const Scene s = defaultScene();
  EXPECT_EQ(s.geometry.n_radar, 5);
  EXPECT_EQ(s.geometry.m_ris, 128);
  EXPECT_EQ(s.interferences.size(), 5u);
  EXPECT_DOUBLE_EQ(s.interferences[0].angle_deg, -25.5);
  EXPECT_DOUBLE_EQ(s.interferences[4].angle_deg, 70.0);
  EXPECT_NEAR(s.interferences[0].power, 1000.0, 1e-9);
  EXPECT_NEAR(s.target_power, 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.channel.los_departure_deg, s.ris_offset_deg);
  EXPECT_EQ(referenceInterferenceAngles().size(), 15u);
  EXPECT_THROW(defaultScene(128, 16), ConfigError);
}

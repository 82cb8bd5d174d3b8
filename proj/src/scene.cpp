#include "risradar/scene.hpp"

#include <cmath>
#include <sstream>

#include "risradar/rng.hpp"

namespace risradar {

namespace {

CVec ulaSteering(int count, double phase_step, double angle_deg) {
  const double step = phase_step * std::sin(degToRad(angle_deg));
  CVec out(count);
  for (int k = 0; k < count; ++k) {
    out[k] = std::polar(1.0, -step * k);
  }
  return out;
}

void checkState(const Scene &scene, const ChannelMatrix &g,
                const BeamformerState &state) {
  const int n = scene.geometry.n_radar;
  const int m = scene.geometry.m_ris;
  if (state.u.size() != n || state.w.size() != n) {
    throw DimensionError("beamformer length does not match radar array");
  }
  if (m > 0 && state.v.size() != m) {
    throw DimensionError("RIS coefficient length does not match RIS");
  }
  if (m > 0 && (g.g.rows() != m || g.g.cols() != n)) {
    throw DimensionError("channel matrix must be M x N");
  }
}

} // namespace

void ArrayGeometry::validate() const {
  if (n_radar < 1) {
    throw ConfigError("n_radar must be >= 1");
  }
  if (m_ris < 0) {
    throw ConfigError("m_ris must be >= 0");
  }
  if (!(spacing_radar > 0.0) || !(spacing_ris > 0.0)) {
    throw ConfigError("element spacings must be positive");
  }
}

void ChannelParams::validate() const {
  if (!(distance > 0.0) || !(ref_distance > 0.0)) {
    throw ConfigError("distances must be positive");
  }
  if (!(ref_loss > 0.0)) {
    throw ConfigError("reference loss must be positive");
  }
  if (!(rician_k >= 0.0)) {
    throw ConfigError("Rician factor must be non-negative");
  }
}

void Scene::validate() const {
  geometry.validate();
  channel.validate();
  if (!(target_power > 0.0) || !(noise_power > 0.0)) {
    throw ConfigError("target and noise powers must be positive");
  }
  for (const auto &itf : interferences) {
    if (!(itf.power > 0.0)) {
      throw ConfigError("interference powers must be positive");
    }
    if (itf.angle_deg == target_angle_deg) {
      std::ostringstream msg;
      msg << "interference at " << itf.angle_deg
          << " deg coincides with the target direction";
      throw ConfigError(msg.str());
    }
  }
}

const std::vector<double> &referenceInterferenceAngles() {
  static const std::vector<double> angles = {
      -25.5, -26.2, -26.9, -39.0, 70.0, 79.0,  64.0, -12.0,
      -41.0, -43.0, -47.0, -52.0, -59.0, -65.0, -74.0};
  return angles;
}

Scene defaultScene(int m_ris, int interference_count, double inr_db,
                   double snr_db) {
  const auto &angles = referenceInterferenceAngles();
  if (interference_count < 0 ||
      interference_count > static_cast<int>(angles.size())) {
    throw ConfigError("reference scene supports 0..15 interferences");
  }
  Scene scene;
  scene.geometry.m_ris = m_ris;
  scene.target_power = dbToLinear(snr_db);
  for (int i = 0; i < interference_count; ++i) {
    scene.interferences.push_back({angles[i], dbToLinear(inr_db)});
  }
  scene.channel.los_departure_deg = scene.ris_offset_deg;
  return scene;
}

CVec steeringRadar(const ArrayGeometry &geometry, double angle_deg) {
  return ulaSteering(geometry.n_radar, geometry.wavenumberSpacingRadar(),
                     angle_deg);
}

CVec steeringRis(const ArrayGeometry &geometry, double angle_deg) {
  if (geometry.m_ris < 1) {
    throw ConfigError("RIS steering vector requested for a RIS-free geometry");
  }
  return ulaSteering(geometry.m_ris, geometry.wavenumberSpacingRis(),
                     angle_deg);
}

double pathLoss(const ChannelParams &channel) {
  return channel.ref_loss *
         std::pow(channel.distance / channel.ref_distance,
                  -channel.path_exponent);
}

ChannelMatrix drawChannel(const ChannelParams &params,
                          const ArrayGeometry &geometry, std::uint64_t seed) {
  params.validate();
  geometry.validate();
  if (geometry.m_ris < 1) {
    throw ConfigError("cannot draw a RIS channel with m_ris = 0");
  }
  const int m = geometry.m_ris;
  const int n = geometry.n_radar;
  const double k = params.rician_k;
  const double los_weight = std::sqrt(k / (1.0 + k));
  const double nlos_weight = std::sqrt(1.0 / (1.0 + k));

  const CVec arrival = steeringRis(geometry, params.los_arrival_deg);
  const CVec departure = steeringRadar(geometry, params.los_departure_deg);

  CounterRng rng(seed, 0x4348414eULL);
  ChannelMatrix out;
  out.g.resize(m, n);
  // column-major fill order fixes the stream-to-entry mapping
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < m; ++row) {
      out.g(row, col) = los_weight * arrival[row] * departure[col] +
                        nlos_weight * rng.complexNormal();
    }
  }
  out.g *= std::sqrt(pathLoss(params));
  return out;
}

CVec compositeResponse(const Scene &scene, const ChannelMatrix &g,
                       const CVec &v, double angle_deg) {
  CVec r = steeringRadar(scene.geometry, angle_deg);
  if (scene.geometry.m_ris == 0) {
    return r;
  }
  const int m = scene.geometry.m_ris;
  if (v.size() != m || g.g.rows() != m ||
      g.g.cols() != scene.geometry.n_radar) {
    throw DimensionError("composite response: inconsistent RIS dimensions");
  }
  const CVec b = steeringRis(scene.geometry, angle_deg + scene.ris_offset_deg);
  r.noalias() += g.g.transpose() * v.cwiseProduct(b);
  return r;
}

CMat composePhi(const Scene &scene, const ChannelMatrix &g, const CVec &v,
                double angle_deg) {
  const CVec r = compositeResponse(scene, g, v, angle_deg);
  const CVec a = steeringRadar(scene.geometry, angle_deg);
  return r * a.transpose();
}

double codesignObjective(const Scene &scene, const ChannelMatrix &g,
                         const BeamformerState &state) {
  checkState(scene, g, state);
  const double w_energy = state.w.squaredNorm();
  if (w_energy == 0.0) {
    throw NumericalError("receive beamformer is zero");
  }
  auto gain = [&](double angle) {
    const CVec r = compositeResponse(scene, g, state.v, angle);
    const Complex tx = steeringRadar(scene.geometry, angle).transpose() *
                       state.u;
    return std::norm(state.w.dot(r) * tx);
  };
  double denom = scene.noise_power * w_energy;
  for (const auto &itf : scene.interferences) {
    denom += itf.power * gain(itf.angle_deg);
  }
  return gain(scene.target_angle_deg) / denom;
}

double outputSinr(const Scene &scene, const ChannelMatrix &g,
                  const BeamformerState &state) {
  return scene.target_power * codesignObjective(scene, g, state);
}

std::vector<std::pair<double, double>>
beampattern(const Scene &scene, const ChannelMatrix &g,
            const BeamformerState &state, const std::vector<double> &grid_deg) {
  checkState(scene, g, state);
  std::vector<std::pair<double, double>> out;
  out.reserve(grid_deg.size());
  for (double angle : grid_deg) {
    const CVec r = compositeResponse(scene, g, state.v, angle);
    const Complex tx = steeringRadar(scene.geometry, angle).transpose() *
                       state.u;
    const double power = std::norm(state.w.dot(r) * tx);
    out.emplace_back(angle, linearToDb(power));
  }
  return out;
}

} // namespace risradar

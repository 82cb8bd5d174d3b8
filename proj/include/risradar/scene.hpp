#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "risradar/types.hpp"

namespace risradar {

/// Radar ULA and RIS ULA. Spacings are in wavelengths; the per-element phase
/// step of a steering vector is 2*pi*spacing*sin(theta).
struct ArrayGeometry {
  int n_radar = 5;
  int m_ris = 128; ///< 0 means no RIS
  double spacing_radar = 0.5;
  double spacing_ris = 0.5;

  double wavenumberSpacingRadar() const { return 2.0 * kPi * spacing_radar; }
  double wavenumberSpacingRis() const { return 2.0 * kPi * spacing_ris; }

  void validate() const;
};

/// Large-scale path loss plus Rician small-scale fading between radar and RIS.
struct ChannelParams {
  double ref_loss = 1e-3;    ///< C_0, linear
  double ref_distance = 1.0; ///< D_0, meters
  double distance = 3.0;     ///< D, meters
  double path_exponent = 2.2;
  double rician_k = 0.5;
  double los_departure_deg = 20.0;
  double los_arrival_deg = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Interference {
  double angle_deg = 0.0;
  double power = 1.0; ///< linear, relative to noise
};

struct Scene {
  ArrayGeometry geometry;
  ChannelParams channel;
  double target_angle_deg = 30.0;
  double target_power = 10.0; ///< sigma_0^2, linear
  std::vector<Interference> interferences;
  double noise_power = 1.0;
  double ris_offset_deg = 20.0; ///< theta_tr

  void validate() const;

  std::size_t interferenceCount() const { return interferences.size(); }
  bool hasRis() const { return geometry.m_ris > 0; }
};

/// Channel G between the radar array and the RIS, M x N.
struct ChannelMatrix {
  CMat g;
};

/// Transmit weights u (N), RIS coefficients v (M) and receive weights w (N).
struct BeamformerState {
  CVec u;
  CVec v;
  CVec w;
};

/// The fifteen interference directions of the reference experiments, in the
/// order they are added: a three-source cluster near -26 deg, two isolated
/// sources, then ten more spread over the field of view.
const std::vector<double> &referenceInterferenceAngles();

/// Reference scene: N = 5, half-wavelength arrays, target at 30 deg with
/// SNR 10 dB, the first `interference_count` reference interferers at
/// `inr_db`, RIS offset 20 deg, D = 3 m, C_0 = -30 dB, eta = 2.2, K_R = 0.5.
Scene defaultScene(int m_ris = 128, int interference_count = 5,
                   double inr_db = 30.0, double snr_db = 10.0);

CVec steeringRadar(const ArrayGeometry &geometry, double angle_deg);
CVec steeringRis(const ArrayGeometry &geometry, double angle_deg);

double pathLoss(const ChannelParams &channel);

ChannelMatrix drawChannel(const ChannelParams &params,
                          const ArrayGeometry &geometry, std::uint64_t seed);
inline ChannelMatrix drawChannel(const ChannelParams &params,
                                 const ArrayGeometry &geometry) {
  return drawChannel(params, geometry, params.seed);
}

/// r(theta) = a(theta) + G^T Diag(v) b(theta + theta_tr); Phi(theta) = r a^T.
CVec compositeResponse(const Scene &scene, const ChannelMatrix &g,
                       const CVec &v, double angle_deg);

/// Phi(theta) = (a(theta) + G^T Diag(v) b(theta + theta_tr)) a^T(theta).
CMat composePhi(const Scene &scene, const ChannelMatrix &g, const CVec &v,
                double angle_deg);

/// Ratio |w^H Phi(theta_0) u|^2 / (w^H Psi_u w + sigma_n^2 w^H w), i.e. the
/// output SINR without the target power factor.
double codesignObjective(const Scene &scene, const ChannelMatrix &g,
                         const BeamformerState &state);

/// Output SINR (linear) including sigma_0^2.
double outputSinr(const Scene &scene, const ChannelMatrix &g,
                  const BeamformerState &state);
inline double outputSinrDb(const Scene &scene, const ChannelMatrix &g,
                           const BeamformerState &state) {
  return linearToDb(outputSinr(scene, g, state));
}

/// |w^H Phi(theta) u|^2 in dB for every angle of the grid (not normalized).
std::vector<std::pair<double, double>>
beampattern(const Scene &scene, const ChannelMatrix &g,
            const BeamformerState &state, const std::vector<double> &grid_deg);

} // namespace risradar

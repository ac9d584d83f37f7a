#pragma once

#include <optional>

namespace cvmdi {

enum class Geometry {
  Symmetric,   // relay midway: L_BC = L_AC
  Asymmetric,  // relay co-located with Bob: L_BC = 0
};

struct ChannelParams {
  Geometry geometry = Geometry::Asymmetric;
  double L_AC = 0.0;  // km
  double L_BC = 0.0;  // km
  double loss_db_per_km = 0.2;
  double eps_A = 0.0;  // SNU
  double eps_B = 0.0;  // SNU
  double eta = 1.0;
  double v_el = 0.0;  // SNU
  double V_A = 1.0;   // SNU
  double beta = 1.0;
  /// Replaces the noise-minimizing gain for sensitivity studies.
  std::optional<double> gain_override;

  /// Sets L_AC and the geometry-implied L_BC.
  void set_distance(double l_ac);

  void validate() const;
};

/// Contributions to the equivalent one-way channel.
struct NoiseBreakdown {
  double T_A = 1.0;
  double T_B = 1.0;
  double g = 0.0;
  double T = 0.0;
  double eps_th = 0.0;
  double chi_line = 0.0;
  double chi_homo = 0.0;
  double chi_tot = 0.0;
};

/// Fiber transmittance 10^(-loss L / 10).
double transmittance(double length_km, double loss_db_per_km);

/// Displacement gain minimizing the thermal excess noise.
double gain(double source_variance, double t_b);

/// Thermal excess noise of the equivalent one-way channel at the
/// noise-minimizing gain, or at the override gain when one is set.
double thermal_excess(const ChannelParams& params);

/// Thermal excess noise for an arbitrary displacement gain g > 0:
///   (T_B/T_A)(eps_B - 1 + V_A) + eps_A + 2/T_A
///     + 2 (V_A - 1 - g sqrt(2 T_B (V_A^2 - 1))) / (T_A g^2)
/// Equals thermal_excess() at g = gain(V_A, T_B).
double thermal_excess_at_gain(const ChannelParams& params, double g);

NoiseBreakdown noise_breakdown(const ChannelParams& params);

}  // namespace cvmdi

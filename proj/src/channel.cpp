#include "cvmdi/channel.hpp"

#include <cmath>
#include <string>

#include "cvmdi/errors.hpp"

namespace cvmdi {

void ChannelParams::set_distance(double l_ac) {
  L_AC = l_ac;
  L_BC = geometry == Geometry::Symmetric ? l_ac : 0.0;
}

void ChannelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(L_AC) || !finite(L_BC) || !finite(loss_db_per_km) || !finite(eps_A) || !finite(eps_B) ||
      !finite(eta) || !finite(v_el) || !finite(V_A) || !finite(beta)) {
    throw Error(ErrorKind::Domain, "channel parameters must be finite");
  }
  if (L_AC < 0.0 || L_BC < 0.0) throw Error(ErrorKind::Domain, "channel lengths must be >= 0");
  if (geometry == Geometry::Symmetric && L_BC != L_AC) {
    throw Error(ErrorKind::Domain, "symmetric geometry requires L_BC == L_AC");
  }
  if (geometry == Geometry::Asymmetric && L_BC != 0.0) {
    throw Error(ErrorKind::Domain, "asymmetric geometry requires L_BC == 0");
  }
  if (loss_db_per_km < 0.0) throw Error(ErrorKind::Domain, "fiber loss must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorKind::Domain, "detector efficiency must lie in (0,1]");
  if (v_el < 0.0) throw Error(ErrorKind::Domain, "electronic noise must be >= 0");
  if (!(V_A > 1.0)) throw Error(ErrorKind::Domain, "source variance V_A must be > 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorKind::Domain, "reconciliation efficiency must lie in (0,1]");
  if (gain_override && !(*gain_override > 0.0 && std::isfinite(*gain_override))) {
    throw Error(ErrorKind::Domain, "gain override must be positive");
  }
}

double transmittance(double length_km, double loss_db_per_km) {
  if (!(length_km >= 0.0)) {
    throw Error(ErrorKind::Domain, "channel length must be >= 0, got " + std::to_string(length_km));
  }
  return std::pow(10.0, -loss_db_per_km * length_km / 10.0);
}

double gain(double source_variance, double t_b) {
  if (!(source_variance >= 1.0)) throw Error(ErrorKind::Domain, "source variance must be >= 1");
  if (!(t_b > 0.0 && t_b <= 1.0)) throw Error(ErrorKind::Domain, "T_B must lie in (0,1]");
  return std::sqrt(2.0 * (source_variance - 1.0) / (t_b * (source_variance + 1.0)));
}

double thermal_excess(const ChannelParams& params) {
  const double t_a = transmittance(params.L_AC, params.loss_db_per_km);
  const double t_b = transmittance(params.L_BC, params.loss_db_per_km);
  if (!(t_a > 0.0)) throw Error(ErrorKind::Domain, "T_A underflowed to 0");
  if (params.gain_override) return thermal_excess_at_gain(params, *params.gain_override);
  return t_b / t_a * (params.eps_B - 2.0) + params.eps_A + 2.0 / t_a;
}

double thermal_excess_at_gain(const ChannelParams& params, double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::Domain, "gain must be > 0");
  const double t_a = transmittance(params.L_AC, params.loss_db_per_km);
  const double t_b = transmittance(params.L_BC, params.loss_db_per_km);
  if (!(t_a > 0.0)) throw Error(ErrorKind::Domain, "T_A underflowed to 0");
  const double v = params.V_A;
  const double residual = v - 1.0 - g * std::sqrt(2.0 * t_b * (v * v - 1.0));
  return t_b / t_a * (params.eps_B - 1.0 + v) + params.eps_A + 2.0 / t_a + 2.0 * residual / (t_a * g * g);
}

NoiseBreakdown noise_breakdown(const ChannelParams& params) {
  params.validate();
  NoiseBreakdown nb;
  nb.T_A = transmittance(params.L_AC, params.loss_db_per_km);
  nb.T_B = transmittance(params.L_BC, params.loss_db_per_km);
  if (!(nb.T_A > 0.0) || !(nb.T_B > 0.0)) throw Error(ErrorKind::Domain, "channel transmittance underflowed to 0");
  nb.g = params.gain_override ? *params.gain_override : gain(params.V_A, nb.T_B);
  nb.T = nb.T_A * nb.g * nb.g / 2.0;
  nb.eps_th = thermal_excess(params);
  nb.chi_line = (1.0 - nb.T) / nb.T + nb.eps_th;
  nb.chi_homo = (params.v_el + 1.0 - params.eta) / params.eta;
  nb.chi_tot = nb.chi_line + 2.0 * nb.chi_homo / nb.T_A;
  return nb;
}

}  // namespace cvmdi

#ifndef UPB_DEVICE_HPP
#define UPB_DEVICE_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace upb {

// CODATA 2018
inline constexpr double HBAR_JS = 1.054571817e-34;
inline constexpr double EV_J = 1.602176634e-19;
inline constexpr double UEV_J = 1.602176634e-25;
inline constexpr double EPS0_F_M = 8.8541878128e-12;

/// Conversion anchor between natural units (hbar = kappa_ref = 1) and SI.
struct PhysicalScale {
  double hbar_kappa_uev = 1.0;   // energy hbar*kappa in micro-eV
  double photon_energy_ev = 0.8; // hbar*omega_c in eV

  double kappa_rad_s() const { return hbar_kappa_uev * UEV_J / HBAR_JS; }
  double time_unit_s() const { return 1.0 / kappa_rad_s(); }
  double energy_uev_from_natural(double e) const { return e * hbar_kappa_uev; }
  void validate() const;
};

/// Optimal interference conditions for a given Kerr magnitude |U|/(hbar kappa):
/// J_opt/(hbar kappa) = sqrt((2/(3 sqrt 3)) * hbar kappa/|U|), Delta_opt = -kappa/(2 sqrt 3).
/// The quoted Delta_opt applies to the self-focusing sign convention (u < 0 in
/// SystemParams); for u > 0 the optimum is the mirrored pair (+Delta_opt).
struct OptimalConditions {
  double j_opt;       // units hbar*kappa
  double delta_opt;   // units kappa
};
OptimalConditions optimal_conditions(double u_over_hbar_kappa);

/// Single-photon emission rate n1 * kappa / (2 pi), in Hz.
double emission_rate(double n1, const PhysicalScale& scale);
/// Drive power hbar*omega_c * (F/hbar) / (2 pi), in W, for F in hbar*kappa units.
double input_power(double f_over_hbar_kappa, const PhysicalScale& scale);
/// Instantaneous intracavity energy n_photons * hbar*omega_c, in J.
double intracavity_energy(double n_photons, const PhysicalScale& scale);

/// Discretized three-dimensional cavity mode profile on a regular grid.
/// Index convention: idx = (ix*ny + iy)*nz + iz.
struct ModeProfileGrid {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;           // meters
  std::vector<std::complex<double>> field_x, field_y, field_z;  // alpha(r)
  std::vector<double> epsilon;                   // relative permittivity
  std::vector<double> chi3;                      // m^2/V^2

  size_t size() const { return size_t(nx) * size_t(ny) * size_t(nz); }
  double cell_volume() const { return dx * dy * dz; }
  size_t index(int ix, int iy, int iz) const {
    return (size_t(ix) * size_t(ny) + size_t(iy)) * size_t(nz) + size_t(iz);
  }
  double norm_integral() const;  // integral of |alpha|^2 dV
  void normalize();              // scale field so the norm integral is 1
  void validate() const;
};

struct EffectiveUResult {
  double u_uev = 0.0;
  double u_half_resolution_uev = 0.0;  // same quadrature on every other grid point
  double refinement_rel_change = 0.0;
};

/// Kerr interaction energy U = D (hbar w)^2/(8 eps0) * integral chi3/eps^2 |alpha|^4 dV,
/// midpoint quadrature on the grid; the input field is normalized internally.
EffectiveUResult effective_u(const ModeProfileGrid& grid, double photon_energy_ev,
                             double d_factor = 24.0);

/// Mode-profile file format: text header then row-major little-endian binary
/// blocks re(ax),re(ay),re(az),im(ax),im(ay),im(az),epsilon,chi3.
void write_mode_profile(const std::string& path, const ModeProfileGrid& grid);
ModeProfileGrid read_mode_profile(const std::string& path);

/// Analytic test profiles.
/// Uniform y-polarized field in a homogeneous box (closed-form U).
ModeProfileGrid make_box_profile(int n, double box_len_m, double eps, double chi3);
/// L3-like synthetic mode: standing wave along x with gaussian envelopes,
/// confined to a silicon slab; chi3 nonzero in the silicon only.
ModeProfileGrid make_l3_profile(int nx = 96, int ny = 64, int nz = 32);

}  // namespace upb

#endif

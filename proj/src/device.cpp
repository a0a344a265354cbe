#include "upb/device.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace upb {

void PhysicalScale::validate() const {
  if (!(hbar_kappa_uev > 0.0) || !(photon_energy_ev > 0.0))
    throw std::invalid_argument("PhysicalScale: energies must be positive");
}

OptimalConditions optimal_conditions(double u_over_hbar_kappa) {
  if (!(u_over_hbar_kappa > 0.0))
    throw std::invalid_argument("optimal_conditions: Kerr magnitude must be positive");
  OptimalConditions oc;
  oc.j_opt = std::sqrt(2.0 / (3.0 * std::sqrt(3.0)) / u_over_hbar_kappa);
  oc.delta_opt = -1.0 / (2.0 * std::sqrt(3.0));
  return oc;
}

double emission_rate(double n1, const PhysicalScale& scale) {
  scale.validate();
  if (!(n1 >= 0.0)) throw std::invalid_argument("emission_rate: occupation must be >= 0");
  return n1 * scale.kappa_rad_s() / (2.0 * M_PI);
}

double input_power(double f_over_hbar_kappa, const PhysicalScale& scale) {
  scale.validate();
  if (!(f_over_hbar_kappa >= 0.0)) throw std::invalid_argument("input_power: F must be >= 0");
  const double f_rate = f_over_hbar_kappa * scale.kappa_rad_s();  // F/hbar in 1/s
  return scale.photon_energy_ev * EV_J * f_rate / (2.0 * M_PI);
}

double intracavity_energy(double n_photons, const PhysicalScale& scale) {
  scale.validate();
  if (!(n_photons >= 0.0)) throw std::invalid_argument("intracavity_energy: n must be >= 0");
  return n_photons * scale.photon_energy_ev * EV_J;
}

double ModeProfileGrid::norm_integral() const {
  double acc = 0.0;
  for (size_t i = 0; i < size(); ++i)
    acc += std::norm(field_x[i]) + std::norm(field_y[i]) + std::norm(field_z[i]);
  return acc * cell_volume();
}

void ModeProfileGrid::normalize() {
  const double n = norm_integral();
  if (!(n > 0.0)) throw std::invalid_argument("ModeProfileGrid: zero field cannot be normalized");
  const double s = 1.0 / std::sqrt(n);
  for (size_t i = 0; i < size(); ++i) {
    field_x[i] *= s;
    field_y[i] *= s;
    field_z[i] *= s;
  }
}

void ModeProfileGrid::validate() const {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("ModeProfileGrid: empty shape");
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0))
    throw std::invalid_argument("ModeProfileGrid: spacing must be positive");
  const size_t n = size();
  if (field_x.size() != n || field_y.size() != n || field_z.size() != n ||
      epsilon.size() != n || chi3.size() != n)
    throw std::invalid_argument("ModeProfileGrid: array sizes do not match shape");
  for (double e : epsilon)
    if (!(e >= 1.0)) throw std::invalid_argument("ModeProfileGrid: epsilon below vacuum");
}

namespace {

double quadrature_u(const ModeProfileGrid& g, double photon_energy_ev, double d_factor,
                    int stride) {
  const double hw = photon_energy_ev * EV_J;
  const double pref = d_factor * hw * hw / (8.0 * EPS0_F_M);
  double acc = 0.0;
  double norm = 0.0;
  const double dv = g.cell_volume() * double(stride) * double(stride) * double(stride);
  for (int ix = 0; ix < g.nx; ix += stride)
    for (int iy = 0; iy < g.ny; iy += stride)
      for (int iz = 0; iz < g.nz; iz += stride) {
        const size_t i = g.index(ix, iy, iz);
        const double a2 = std::norm(g.field_x[i]) + std::norm(g.field_y[i]) + std::norm(g.field_z[i]);
        acc += g.chi3[i] / (g.epsilon[i] * g.epsilon[i]) * a2 * a2 * dv;
        norm += a2 * dv;
      }
  if (!(norm > 0.0)) throw std::invalid_argument("effective_u: field is zero everywhere");
  // normalize within the same quadrature so |alpha|^2 integrates to exactly 1
  return pref * acc / (norm * norm) / UEV_J;
}

}  // namespace

EffectiveUResult effective_u(const ModeProfileGrid& grid, double photon_energy_ev,
                             double d_factor) {
  grid.validate();
  if (!(photon_energy_ev > 0.0)) throw std::invalid_argument("effective_u: photon energy <= 0");
  EffectiveUResult res;
  res.u_uev = quadrature_u(grid, photon_energy_ev, d_factor, 1);
  if (grid.nx >= 4 && grid.ny >= 4 && grid.nz >= 4) {
    res.u_half_resolution_uev = quadrature_u(grid, photon_energy_ev, d_factor, 2);
    res.refinement_rel_change =
        std::abs(res.u_uev - res.u_half_resolution_uev) / std::max(std::abs(res.u_uev), 1e-300);
  } else {
    res.u_half_resolution_uev = res.u_uev;
    res.refinement_rel_change = 0.0;
  }
  return res;
}

void write_mode_profile(const std::string& path, const ModeProfileGrid& grid) {
  grid.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_mode_profile: cannot open " + path);
  char head[256];
  std::snprintf(head, sizeof head,
                "UPB-MODE-PROFILE v1\nshape %d %d %d\nspacing %.17g %.17g %.17g\nfields 8\n",
                grid.nx, grid.ny, grid.nz, grid.dx, grid.dy, grid.dz);
  f << head;
  const size_t n = grid.size();
  std::vector<double> block(n);
  auto put_real = [&](auto getter) {
    for (size_t i = 0; i < n; ++i) block[i] = getter(i);
    f.write(reinterpret_cast<const char*>(block.data()), std::streamsize(n * sizeof(double)));
  };
  put_real([&](size_t i) { return grid.field_x[i].real(); });
  put_real([&](size_t i) { return grid.field_y[i].real(); });
  put_real([&](size_t i) { return grid.field_z[i].real(); });
  put_real([&](size_t i) { return grid.field_x[i].imag(); });
  put_real([&](size_t i) { return grid.field_y[i].imag(); });
  put_real([&](size_t i) { return grid.field_z[i].imag(); });
  put_real([&](size_t i) { return grid.epsilon[i]; });
  put_real([&](size_t i) { return grid.chi3[i]; });
  if (!f) throw std::runtime_error("write_mode_profile: write failed for " + path);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::streampos pos, const std::string& what) {
  std::ostringstream os;
  os << "read_mode_profile: " << what << " in " << path << " at byte offset " << pos;
  throw std::runtime_error(os.str());
}

}  // namespace

ModeProfileGrid read_mode_profile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_mode_profile: cannot open " + path);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(f, line)) parse_fail(path, f.tellg(), what);
    return line;
  };
  if (next_line("missing magic line") != "UPB-MODE-PROFILE v1")
    parse_fail(path, 0, "bad magic line (expected 'UPB-MODE-PROFILE v1')");
  ModeProfileGrid g;
  {
    std::istringstream is(next_line("missing shape line"));
    std::string tag;
    if (!(is >> tag >> g.nx >> g.ny >> g.nz) || tag != "shape" || g.nx < 1 || g.ny < 1 || g.nz < 1)
      parse_fail(path, f.tellg(), "bad shape line");
  }
  {
    std::istringstream is(next_line("missing spacing line"));
    std::string tag;
    if (!(is >> tag >> g.dx >> g.dy >> g.dz) || tag != "spacing" || !(g.dx > 0 && g.dy > 0 && g.dz > 0))
      parse_fail(path, f.tellg(), "bad spacing line");
  }
  {
    std::istringstream is(next_line("missing fields line"));
    std::string tag;
    int count = 0;
    if (!(is >> tag >> count) || tag != "fields" || count != 8)
      parse_fail(path, f.tellg(), "bad fields line (expected 'fields 8')");
  }
  const size_t n = g.size();
  std::vector<double> re_x(n), re_y(n), re_z(n), im_x(n), im_y(n), im_z(n);
  g.epsilon.resize(n);
  g.chi3.resize(n);
  auto read_block = [&](std::vector<double>& dst, const char* what) {
    f.read(reinterpret_cast<char*>(dst.data()), std::streamsize(n * sizeof(double)));
    if (size_t(f.gcount()) != n * sizeof(double)) parse_fail(path, f.tellg(), what);
  };
  read_block(re_x, "truncated field_x real block");
  read_block(re_y, "truncated field_y real block");
  read_block(re_z, "truncated field_z real block");
  read_block(im_x, "truncated field_x imag block");
  read_block(im_y, "truncated field_y imag block");
  read_block(im_z, "truncated field_z imag block");
  read_block(g.epsilon, "truncated epsilon block");
  read_block(g.chi3, "truncated chi3 block");
  g.field_x.resize(n);
  g.field_y.resize(n);
  g.field_z.resize(n);
  for (size_t i = 0; i < n; ++i) {
    g.field_x[i] = {re_x[i], im_x[i]};
    g.field_y[i] = {re_y[i], im_y[i]};
    g.field_z[i] = {re_z[i], im_z[i]};
  }
  g.validate();
  return g;
}

ModeProfileGrid make_box_profile(int n, double box_len_m, double eps, double chi3) {
  if (n < 2) throw std::invalid_argument("make_box_profile: need n >= 2");
  ModeProfileGrid g;
  g.nx = g.ny = g.nz = n;
  g.dx = g.dy = g.dz = box_len_m / double(n);
  const size_t total = g.size();
  const double amp = 1.0 / std::sqrt(box_len_m * box_len_m * box_len_m);
  g.field_x.assign(total, 0.0);
  g.field_y.assign(total, amp);
  g.field_z.assign(total, 0.0);
  g.epsilon.assign(total, eps);
  g.chi3.assign(total, chi3);
  return g;
}

ModeProfileGrid make_l3_profile(int nx, int ny, int nz) {
  // Silicon photonic-crystal L3 stand-in at 1.5 um: y-polarized standing wave
  // along the cavity axis, gaussian envelopes, 220 nm slab, chi3 in the silicon.
  const double lattice = 400e-9;
  const double slab = 220e-9;
  const double eps_si = 3.48 * 3.48;
  const double chi3_si = 0.9e-18;
  const double lx = 8.0 * lattice, ly = 6.0 * lattice, lz = 4.0 * slab;
  ModeProfileGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.dx = lx / double(nx);
  g.dy = ly / double(ny);
  g.dz = lz / double(nz);
  const size_t total = g.size();
  g.field_x.assign(total, 0.0);
  g.field_y.assign(total, 0.0);
  g.field_z.assign(total, 0.0);
  g.epsilon.assign(total, 1.0);
  g.chi3.assign(total, 0.0);
  const double sx = 1.45 * lattice, sy = 0.85 * lattice, sz = 0.55 * slab;
  const double k_wave = M_PI / (1.3 * lattice);  // half-wave antinode spacing along x
  for (int ix = 0; ix < nx; ++ix) {
    const double x = (ix + 0.5) * g.dx - 0.5 * lx;
    for (int iy = 0; iy < ny; ++iy) {
      const double y = (iy + 0.5) * g.dy - 0.5 * ly;
      for (int iz = 0; iz < nz; ++iz) {
        const double z = (iz + 0.5) * g.dz - 0.5 * lz;
        const size_t i = g.index(ix, iy, iz);
        const bool in_slab = std::abs(z) <= 0.5 * slab;
        const double envelope = std::exp(-0.5 * (x * x / (sx * sx) + y * y / (sy * sy)));
        const double vertical = in_slab ? std::cos(M_PI * z / slab) : 0.0;
        g.field_y[i] = envelope * vertical * std::cos(k_wave * x);
        g.epsilon[i] = in_slab ? eps_si : 1.0;
        g.chi3[i] = in_slab ? chi3_si : 0.0;
      }
    }
  }
  g.normalize();
  return g;
}

}  // namespace upb

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sn/constants.hpp"

namespace sn {

// Parameters of a homogeneous sphere of total mass M and radius R.
struct SphereKernelParams {
  double total_mass = 0.0;  // kg
  double radius = 0.0;      // m
};

// Sphere plus crystalline substructure: atoms of mass m_atom localised with a
// Gaussian distribution of width sigma around their lattice sites.
struct CrystalKernelParams {
  double total_mass = 0.0;  // kg
  double radius = 0.0;      // m
  double atom_mass = 0.0;   // kg
  double sigma = 0.0;       // m
};

// Mutual Newtonian energy integral of a mass distribution with a copy of
// itself displaced by d, in kg^2/m. The gravitational potential of the
// centre-of-mass equation is -G times the convolution of |psi|^2 with this.

// Homogeneous sphere: interior polynomial for d <= 2R, M^2/d outside.
double i_sphere(double d, const SphereKernelParams& p);

// Crystalline: 6M^2/5R plus the single-site term (M m_atom / d) erf(d / sqrt(2) sigma).
// The d -> 0 limit is evaluated by series; valid for separations small
// compared to R.
double i_crystal(double d, const CrystalKernelParams& p);

// Quadratic small-d expansion of i_crystal.
double i_narrow(double d, const CrystalKernelParams& p);

// Characteristic self-gravity angular frequency
// sqrt( sqrt(2/pi) G m_atom / (3 sigma^3) ), s^-1.
double omega_sn(double atom_mass_kg, double sigma_m);

// Spherically symmetric mass density tabulated on a uniform radial grid
// r_i = i * (r_max / (n-1)); rho in kg/m^3. Zero density outside r_max.
struct RadialDensityTable {
  std::vector<double> r;    // m, uniform, starting at 0
  std::vector<double> rho;  // kg/m^3, non-negative

  double integrated_mass() const;  // 4 pi \int rho r^2 dr
};

// Kernel for a tabulated density: the six-dimensional displacement integral
// reduced, for spherical rho, to nested radial quadratures
//   I(d) = (2 pi / d) \int du u rho(u) [ T(u+d) - T(|d-u|) ],
//   T(s) = \int_0^s s' phi(s') ds',  phi(s) = M_in(s)/s + 4 pi \int_s r rho dr.
// Auxiliary tables are built once on a refined grid; evaluation is O(n).
class NumericKernel {
 public:
  // declared_mass, when positive, is checked against the table integral to
  // relative 1e-6 (mismatch rejected).
  explicit NumericKernel(RadialDensityTable table, double declared_mass = -1.0,
                         int refine = 4);

  double operator()(double d) const;
  double total_mass() const { return mass_; }
  double table_radius() const { return r_max_; }

 private:
  double mass_ = 0.0;
  double r_max_ = 0.0;
  double dr_ = 0.0;
  std::vector<double> rho_;     // refined grid
  std::vector<double> t_table_; // T(s) on the refined grid, extended analytically beyond
  std::vector<double> phi_;     // phi(s) on the refined grid
};

// Convenience wrapper implementing the one-shot evaluation.
double i_numeric(const RadialDensityTable& table, double d,
                 double declared_mass = -1.0);

// Variant-erased kernel handed to the dynamics solvers. Immutable after
// construction; evaluation is reentrant.
class SelfGravityKernel {
 public:
  enum class Variant { delta, sphere, crystal, narrow, numeric };

  static SelfGravityKernel delta(double total_mass);
  static SelfGravityKernel sphere(SphereKernelParams p);
  static SelfGravityKernel crystal(CrystalKernelParams p);
  static SelfGravityKernel narrow(CrystalKernelParams p);
  static SelfGravityKernel numeric(RadialDensityTable table,
                                   double declared_mass = -1.0);

  // Evaluates at |d|; the kernel depends on the separation magnitude only.
  double operator()(double d) const;

  Variant variant() const { return variant_; }
  const char* variant_name() const;
  double total_mass() const { return mass_; }

  // Characteristic size of the mass distribution (R, sigma, or table extent);
  // 0 for the point kernel.
  double structure_scale() const { return structure_scale_; }

  // True if I(0) is finite (false only for the point kernel, whose on-axis
  // self-term is excluded from discrete convolutions).
  bool finite_at_zero() const { return variant_ != Variant::delta; }

  // Crystal-form kernels are derived for separations small compared to R;
  // returns a warning when the caller intends to sample beyond that.
  std::optional<std::string> extent_warning(double max_separation) const;

  const std::vector<std::string>& construction_warnings() const {
    return construction_warnings_;
  }

 private:
  SelfGravityKernel() = default;

  Variant variant_ = Variant::delta;
  double mass_ = 0.0;
  double structure_scale_ = 0.0;
  SphereKernelParams sphere_params_{};
  CrystalKernelParams crystal_params_{};
  std::shared_ptr<const NumericKernel> numeric_;
  std::vector<std::string> construction_warnings_;
};

}  // namespace sn

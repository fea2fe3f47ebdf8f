#include "sn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sn/errors.hpp"
#include "sn/quadrature.hpp"

namespace sn {

namespace {

constexpr double kPi = std::numbers::pi;

// erf(x)/x, finite and smooth through x = 0. Series below x = 1e-4 where the
// direct quotient would lose digits; truncation there is ~1e-26.
double erf_over_x(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 2.0 / std::sqrt(kPi) * (1.0 - x2 / 3.0 + x2 * x2 / 10.0);
  }
  return std::erf(x) / x;
}

}  // namespace

double i_sphere(double d, const SphereKernelParams& p) {
  if (!(p.total_mass > 0.0) || !(p.radius > 0.0))
    throw ValidationError("sphere kernel: mass and radius must be positive");
  if (d < 0.0) d = -d;
  const double m2 = p.total_mass * p.total_mass;
  if (d >= 2.0 * p.radius) return m2 / d;
  const double q = d / (2.0 * p.radius);
  const double q2 = q * q;
  const double poly = 1.2 - 2.0 * q2 + 1.5 * q2 * q - 0.2 * q2 * q2 * q;
  return m2 / p.radius * poly;
}

double i_crystal(double d, const CrystalKernelParams& p) {
  if (!(p.total_mass > 0.0) || !(p.radius > 0.0) || !(p.atom_mass > 0.0) ||
      !(p.sigma > 0.0))
    throw ValidationError("crystal kernel: all parameters must be positive");
  if (d < 0.0) d = -d;
  const double bulk = 1.2 * p.total_mass * p.total_mass / p.radius;
  const double x = d / (std::numbers::sqrt2 * p.sigma);
  // (M m / d) erf(d / sqrt(2) sigma) = (M m / (sqrt(2) sigma)) * erf(x)/x
  const double site =
      p.total_mass * p.atom_mass / (std::numbers::sqrt2 * p.sigma) * erf_over_x(x);
  return bulk + site;
}

double i_narrow(double d, const CrystalKernelParams& p) {
  if (!(p.total_mass > 0.0) || !(p.radius > 0.0) || !(p.atom_mass > 0.0) ||
      !(p.sigma > 0.0))
    throw ValidationError("narrow kernel: all parameters must be positive");
  const double bulk = 1.2 * p.total_mass * p.total_mass / p.radius;
  const double site0 =
      2.0 * p.total_mass * p.atom_mass / (std::sqrt(2.0 * kPi) * p.sigma);
  return bulk + site0 * (1.0 - d * d / (6.0 * p.sigma * p.sigma));
}

double omega_sn(double atom_mass_kg, double sigma_m) {
  if (!(atom_mass_kg > 0.0) || !(sigma_m > 0.0))
    throw ValidationError("omega_sn: atom mass and sigma must be positive");
  const double w2 = std::sqrt(2.0 / kPi) * constants.G * atom_mass_kg /
                    (3.0 * sigma_m * sigma_m * sigma_m);
  return std::sqrt(w2);
}

double RadialDensityTable::integrated_mass() const {
  if (r.size() != rho.size() || r.size() < 2)
    throw ValidationError("density table: need matching r/rho with >= 2 rows");
  std::vector<double> f(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) f[i] = 4.0 * kPi * r[i] * r[i] * rho[i];
  const double dr = r[1] - r[0];
  return cumulative_parabolic(f, dr).back();
}

NumericKernel::NumericKernel(RadialDensityTable table, double declared_mass,
                             int refine) {
  const std::size_t n_in = table.r.size();
  if (n_in < 4 || table.rho.size() != n_in)
    throw ValidationError("density table: need matching r/rho with >= 4 rows");
  const double dr_in = table.r[1] - table.r[0];
  // tolerant enough for text tables rounded to ~6 significant digits
  const double grid_tol = 2e-6 * (table.r.back() + dr_in);
  for (std::size_t i = 0; i < n_in; ++i) {
    if (table.rho[i] < 0.0)
      throw ValidationError("density table: rho must be non-negative");
    const double expect = table.r[0] + static_cast<double>(i) * dr_in;
    if (std::abs(table.r[i] - expect) > grid_tol)
      throw ValidationError("density table: radial grid must be uniform");
  }
  if (std::abs(table.r[0]) > 1e-12 * table.r.back())
    throw ValidationError("density table: grid must start at r = 0");

  r_max_ = table.r.back();
  refine = std::max(1, refine);
  const std::size_t n = std::max<std::size_t>((n_in - 1) * refine + 1, 2049);
  dr_ = r_max_ / static_cast<double>(n - 1);

  // Linear resampling preserves the piecewise-linear density the table defines.
  rho_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) * dr_;
    const double s = r / dr_in;
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(s), n_in - 2);
    const double t = s - static_cast<double>(j);
    rho_[i] = (1.0 - t) * table.rho[j] + t * table.rho[j + 1];
  }

  // Cumulative mass and outer integral build the potential-like profile phi.
  std::vector<double> f(n), g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) * dr_;
    f[i] = 4.0 * kPi * r * r * rho_[i];
    g[i] = 4.0 * kPi * r * rho_[i];
  }
  const std::vector<double> mass_in = cumulative_parabolic(f, dr_);
  const std::vector<double> g_cum = cumulative_parabolic(g, dr_);
  mass_ = mass_in.back();
  if (!(mass_ > 0.0)) throw ValidationError("density table: zero total mass");
  if (declared_mass > 0.0 &&
      std::abs(mass_ - declared_mass) / declared_mass > 1e-6)
    throw ValidationError(
        "density table integrates to a mass inconsistent with the declared "
        "total (relative mismatch > 1e-6)");

  phi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = static_cast<double>(i) * dr_;
    const double tail = g_cum.back() - g_cum[i];
    phi_[i] = (i == 0 ? 0.0 : mass_in[i] / r) + tail;
  }

  std::vector<double> sphi(n);
  for (std::size_t i = 0; i < n; ++i) sphi[i] = static_cast<double>(i) * dr_ * phi_[i];
  t_table_ = cumulative_parabolic(sphi, dr_);
}

double NumericKernel::operator()(double d) const {
  if (d < 0.0) d = -d;
  const std::size_t n = rho_.size();

  // T(s) extends analytically beyond the table: phi = M/s there.
  auto t_of = [&](double s) {
    if (s <= r_max_) return interp_cubic_uniform(t_table_, dr_, s);
    return t_table_.back() + mass_ * (s - r_max_);
  };

  if (d < 0.5 * dr_) {
    // Coincidence limit: I(0) = 4 pi \int u^2 rho(u) phi(u) du.
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) * dr_;
      f[i] = 4.0 * kPi * u * u * rho_[i] * phi_[i];
    }
    return cumulative_parabolic(f, dr_).back();
  }

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) * dr_;
    f[i] = u * rho_[i] * (t_of(u + d) - t_of(std::abs(d - u)));
  }
  return 2.0 * kPi / d * cumulative_parabolic(f, dr_).back();
}

double i_numeric(const RadialDensityTable& table, double d, double declared_mass) {
  return NumericKernel(table, declared_mass)(d);
}

SelfGravityKernel SelfGravityKernel::delta(double total_mass) {
  if (!(total_mass > 0.0)) throw ValidationError("delta kernel: mass must be positive");
  SelfGravityKernel k;
  k.variant_ = Variant::delta;
  k.mass_ = total_mass;
  k.structure_scale_ = 0.0;
  return k;
}

SelfGravityKernel SelfGravityKernel::sphere(SphereKernelParams p) {
  SelfGravityKernel k;
  (void)i_sphere(0.0, p);  // parameter validation
  k.variant_ = Variant::sphere;
  k.mass_ = p.total_mass;
  k.structure_scale_ = p.radius;
  k.sphere_params_ = p;
  return k;
}

SelfGravityKernel SelfGravityKernel::crystal(CrystalKernelParams p) {
  SelfGravityKernel k;
  (void)i_crystal(0.0, p);
  k.variant_ = Variant::crystal;
  k.mass_ = p.total_mass;
  k.structure_scale_ = p.sigma;
  k.crystal_params_ = p;
  if (p.atom_mass > p.total_mass)
    throw ValidationError("crystal kernel: atom mass exceeds total mass");
  if (!(p.sigma < p.radius))
    k.construction_warnings_.push_back(
        "crystal kernel: sigma >= particle radius R; the crystalline form "
        "assumes sigma << R");
  return k;
}

SelfGravityKernel SelfGravityKernel::narrow(CrystalKernelParams p) {
  SelfGravityKernel k = crystal(p);
  k.variant_ = Variant::narrow;
  return k;
}

SelfGravityKernel SelfGravityKernel::numeric(RadialDensityTable table,
                                             double declared_mass) {
  SelfGravityKernel k;
  k.numeric_ = std::make_shared<const NumericKernel>(std::move(table), declared_mass);
  k.variant_ = Variant::numeric;
  k.mass_ = k.numeric_->total_mass();
  k.structure_scale_ = k.numeric_->table_radius();
  return k;
}

double SelfGravityKernel::operator()(double d) const {
  if (d < 0.0) d = -d;
  switch (variant_) {
    case Variant::delta:
      return mass_ * mass_ / d;  // +inf at d = 0 by IEEE division
    case Variant::sphere:
      return i_sphere(d, sphere_params_);
    case Variant::crystal:
      return i_crystal(d, crystal_params_);
    case Variant::narrow:
      return i_narrow(d, crystal_params_);
    case Variant::numeric:
      return (*numeric_)(d);
  }
  return 0.0;
}

const char* SelfGravityKernel::variant_name() const {
  switch (variant_) {
    case Variant::delta: return "delta";
    case Variant::sphere: return "sphere";
    case Variant::crystal: return "crystal";
    case Variant::narrow: return "narrow";
    case Variant::numeric: return "numeric";
  }
  return "?";
}

std::optional<std::string> SelfGravityKernel::extent_warning(
    double max_separation) const {
  if (variant_ != Variant::crystal && variant_ != Variant::narrow)
    return std::nullopt;
  if (max_separation <= crystal_params_.radius) return std::nullopt;
  return "kernel '" + std::string(variant_name()) +
         "' sampled out to separation " + std::to_string(max_separation) +
         " m, beyond the particle radius R = " +
         std::to_string(crystal_params_.radius) +
         " m; the crystalline form assumes the wave-function extent is small "
         "compared to R";
}

}  // namespace sn

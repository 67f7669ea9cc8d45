#pragma once

// Truncated Patterson-Sullivan machinery: weighted Poincare series, the
// region of convergence, supporting-line parameters and finite (b, theta)
// densities with their Radon-Nikodym checks.

#include <memory>
#include <string>
#include <vector>

#include "hyperlab/growth.hpp"

namespace hyperlab {

using AtomList = std::shared_ptr<const std::vector<OrbitAtom>>;

inline const std::vector<double> kDefaultSSchedule{1.2, 1.1, 1.05, 1.02, 1.01};
inline constexpr double kDefaultTau = 24.0;

// Patterson's auxiliary function; only h = 1 is supported.
enum class HMode { ConstantOne };

struct DensityParams {
  Slope theta{kHalfPi / 2.0};
  double tau = kDefaultTau;
  BVector b;
  double s = 1.1;
  HMode h_mode = HMode::ConstantOne;

  void validate() const;
};

/// b_gamma(x) = <b, H(x, gamma o)> + tau (d(x, gamma o) - B_theta(x, gamma o)).
double exponent_at(const OrbitAtom& atom, const PPoint& o, const PPoint& x, const Slope& theta,
                   const BVector& b, double tau);

double weighted_poincare(const std::vector<OrbitAtom>& atoms, const PPoint& o, const Slope& theta,
                         double s, const BVector& b, double tau, const PPoint& x);

enum class Region { Inside, Boundary, Outside };
const char* to_string(Region r);

struct RegionVerdict {
  Region region = Region::Boundary;
  double critical_s = 0.0;
  bool low_confidence = false;
};

/// Critical exponent of P_theta^{s,b,tau}(o, o) from unit-shell trends of the
/// truncated series over `window`, compared with s = 1.
RegionVerdict region_membership(const std::vector<OrbitAtom>& atoms, Window window,
                                const Slope& theta, const BVector& b, double tau, double tol);

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SupportingLine {
  BVector b;
  double envelope_delta = 0.0;  // <b, H_theta>
  double grid_delta = 0.0;      // interpolated grid value at theta
  double slack = 0.0;           // envelope_delta - grid_delta
};

/// Supporting line of the concave envelope of the grid at theta.
SupportingLine supporting_line(const PsiGrid& grid, const Slope& theta);
BVector supporting_line_b(const PsiGrid& grid, const Slope& theta);

/// mu_x^s restricted to atoms with dist <= truncation_radius. Atom i carries
/// mass weights[i] / normalization; atoms beyond the truncation carry 0.
struct FiniteDensity {
  DensityParams params;
  PPoint base{base_point()};
  PPoint x{base_point()};
  AtomList atoms;
  std::vector<double> weights;
  double normalization = 1.0;
  double truncation_radius = 0.0;
  std::vector<std::string> flags;

  double mass(std::size_t i) const { return weights[i] / normalization; }
  double total_mass() const;
};

FiniteDensity build_density(AtomList atoms, const PPoint& o, const DensityParams& params,
                            const PPoint& x, double radius);

/// Mass fraction carried by atoms with |slope - theta| > eps.
double off_slope_mass(const FiniteDensity& mu, double eps);
/// Largest single-atom mass fraction.
double max_atom_mass(const FiniteDensity& mu);

struct SlopeHistogram {
  std::vector<double> edges;
  std::vector<double> mass;
};

SlopeHistogram slope_histogram(const FiniteDensity& mu, int bins = 18);

struct ClassicalDensity {
  FiniteDensity density;
  SlopeHistogram histogram;
};

/// b = delta(Gamma) H_{theta*}, tau = 0.
ClassicalDensity classical_density(AtomList atoms, const PPoint& o, const PsiGrid& grid,
                                   const PPoint& x, double s, double radius);

/// Boundary cell: arcs of the visual-angle coordinate u = 2 atan(xi) (u = pi at infinity)
/// in each factor.
struct BoundaryCell {
  int i1 = 0;
  int i2 = 0;
  double u1_center = 0.0;
  double u2_center = 0.0;
};

struct CellRow {
  BoundaryCell cell;
  long long atoms = 0;
  double mass_o = 0.0;
  double mass_x = 0.0;
  double ratio = 0.0;
  double expected = 0.0;
  double deviation = 0.0;
};

struct RadonNikodymReport {
  int arcs = 0;
  std::vector<CellRow> rows;
  int skipped = 0;
  double max_deviation = 0.0;
};

double visual_coordinate(const HBoundaryPoint& xi);
HBoundaryPoint from_visual_coordinate(double u);

inline constexpr int kMinCellAtoms = 50;
inline constexpr double kMinCellMass = 1e-6;

/// Compares mu_x(cell) / mu_o(cell) with exp(B^b_{eta}(o, x)) at the cell centers.
RadonNikodymReport radon_nikodym_check(const FiniteDensity& mu_o, const FiniteDensity& mu_x,
                                       int arcs = 12);

}  // namespace hyperlab

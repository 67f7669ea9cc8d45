#pragma once

// Product Schottky groups: ping-pong certification, orbit-ball enumeration
// over reduced words, and the orbit cache CSV.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hyperlab/product.hpp"

namespace hyperlab {

/// Reduced word in the free group on k generators. Letter +i is generator i
/// (1-based), -i its inverse. Stored inline so atoms stay compact.
class Word {
 public:
  static constexpr int kMaxLength = 31;

  Word() = default;
  explicit Word(const std::vector<int>& letters);

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int operator[](int i) const { return letters_[i]; }
  int back() const { return letters_[size_ - 1]; }
  void push_back(int letter);
  void pop_back() { --size_; }
  std::vector<int> letters() const;
  bool is_reduced() const;

  /// "1.-2.1"; the empty word is "e".
  std::string to_string() const;
  static Word parse(const std::string& text);

  friend bool operator==(const Word& a, const Word& b);
  /// Lexicographic on the letter sequence; a proper prefix sorts first.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::array<std::int8_t, kMaxLength> letters_{};
  std::uint8_t size_ = 0;
};

/// Closed half-disk of the upper half-plane bounded by the circle |z - center| = radius.
/// With `exterior` set it is the closed outside of that circle, the disk around infinity.
struct Disk {
  double center = 0.0;
  double radius = 1.0;
  bool exterior = false;

  bool contains(const HPoint& z, double tol = 1e-9) const;
  bool contains(const HBoundaryPoint& xi, double tol = 1e-9) const;
};

/// Generator g maps the outside of `repelling` into `attracting`.
struct PairingDisks {
  Disk attracting;
  Disk repelling;
};

struct SchottkyFactor {
  std::vector<Moebius> generators;
  std::vector<PairingDisks> disks;

  int rank() const { return static_cast<int>(generators.size()); }
  Moebius letter_matrix(int letter) const;
  Moebius word_matrix(const Word& w) const;
};

enum class Coupling { FullProduct, Diagonal };

struct ProductGroup {
  SchottkyFactor factor1;
  SchottkyFactor factor2;
  Coupling coupling = Coupling::FullProduct;
};

/// z -> 4z with disks |z| < 0.9, |z| > 3.6, and z -> (2z + 3)/(z + 2) with disks |z -+ 2| < 1.
SchottkyFactor reference_factor();
/// A lower-growth factor: z -> e^l1 z and the element of length l2 with fixed points +-1.
SchottkyFactor thin_factor(double dilation_length, double length);
/// <z -> 4z> alone; a degenerate factor used for calibration.
SchottkyFactor cyclic_factor();
/// The trivial group.
SchottkyFactor trivial_factor();

struct CertificateCheck {
  std::string name;
  bool passed = true;
  std::string witness;
};

struct CertificateReport {
  std::vector<CertificateCheck> checks;
  bool passed() const;
};

inline constexpr int kPingPongSamples = 720;

CertificateReport certify(const SchottkyFactor& factor, const std::string& label = "factor");
CertificateReport certify(const ProductGroup& group);

/// Displacement bounds used to prune the word tree:
/// d(o, w o) >= lambda_min |w| - offset, and extending a reduced word never
/// lowers the displacement by more than max_drop.
struct FactorBounds {
  double lambda_min = 0.0;
  double offset = 0.0;
  double max_drop = 0.0;
  int word_length_cutoff(double radius) const;
  double prune_margin() const;
};

FactorBounds estimate_bounds(const SchottkyFactor& factor, const HPoint& o);

struct FactorAtom {
  Word word;
  Moebius element;
  HPoint point;
  double dist;
};

/// All reduced words w with d(o, w o) <= radius, sorted by (dist, word).
std::vector<FactorAtom> factor_ball(const SchottkyFactor& factor, const HPoint& o, double radius,
                                    std::size_t max_atoms);

struct OrbitAtom {
  Word word1;
  Word word2;
  PPoint point = base_point();
  DistanceVector hvec;
  Slope slope{0.0};
  double dist = 0.0;
  // Absent when the factor coordinate of the atom sits at the base point.
  std::optional<HBoundaryPoint> bnd1;
  std::optional<HBoundaryPoint> bnd2;
};

OrbitAtom make_atom(const Word& w1, const Word& w2, const PPoint& o, const PPoint& point);
PIsometry element_of(const ProductGroup& group, const OrbitAtom& atom);

class AtomBudgetExceeded : public std::runtime_error {
 public:
  AtomBudgetExceeded(std::size_t reached, std::size_t budget);
  std::size_t reached;
};

inline constexpr std::size_t kDefaultMaxAtoms = 5'000'000;

std::vector<OrbitAtom> orbit_ball(const ProductGroup& group, const PPoint& o, double radius,
                                  std::size_t max_atoms = kDefaultMaxAtoms, int threads = 1);

class OrbitFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kOrbitCsvHeader =
    "word1,word2,dist,h1,h2,theta,bnd1_kind,bnd1_val,bnd2_kind,bnd2_val,p1_re,p1_im,p2_re,p2_im";

void save_orbit(const std::vector<OrbitAtom>& atoms, const std::filesystem::path& path);
std::vector<OrbitAtom> load_orbit(const std::filesystem::path& path);

}  // namespace hyperlab

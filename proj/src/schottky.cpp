#include "hyperlab/schottky.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <thread>

namespace hyperlab {

// ---------------------------------------------------------------- Word

Word::Word(const std::vector<int>& letters) {
  for (int l : letters) push_back(l);
}

void Word::push_back(int letter) {
  if (size_ >= kMaxLength) throw std::length_error("word exceeds the maximal stored length");
  if (letter == 0 || letter > 127 || letter < -127) throw std::invalid_argument("bad letter");
  letters_[size_++] = static_cast<std::int8_t>(letter);
}

std::vector<int> Word::letters() const { return {letters_.begin(), letters_.begin() + size_}; }

bool Word::is_reduced() const {
  for (int i = 1; i < size_; ++i) {
    if (letters_[i] == -letters_[i - 1]) return false;
  }
  return true;
}

std::string Word::to_string() const {
  if (size_ == 0) return "e";
  std::string out;
  for (int i = 0; i < size_; ++i) {
    if (i) out += '.';
    out += std::to_string(letters_[i]);
  }
  return out;
}

Word Word::parse(const std::string& text) {
  if (text == "e") return {};
  Word w;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dot = std::min(text.find('.', pos), text.size());
    const std::string tok = text.substr(pos, dot - pos);
    std::size_t used = 0;
    int letter = 0;
    try {
      letter = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad word '" + text + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("bad word '" + text + "'");
    w.push_back(letter);
    pos = dot + 1;
  }
  return w;
}

bool operator==(const Word& a, const Word& b) {
  return a.size_ == b.size_ && std::equal(a.letters_.begin(), a.letters_.begin() + a.size_,
                                          b.letters_.begin());
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.begin() + a.size_,
                                                b.letters_.begin(), b.letters_.begin() + b.size_);
}

// ---------------------------------------------------------------- disks and factors

bool Disk::contains(const HPoint& z, double tol) const {
  const double r = std::abs(z.z() - std::complex<double>(center, 0.0));
  const double slack = tol * std::max(1.0, radius);
  return exterior ? r >= radius - slack : r <= radius + slack;
}

bool Disk::contains(const HBoundaryPoint& xi, double tol) const {
  if (xi.is_infinite()) return exterior;
  const double r = std::abs(xi.value() - center);
  const double slack = tol * std::max(1.0, radius);
  return exterior ? r >= radius - slack : r <= radius + slack;
}

Moebius SchottkyFactor::letter_matrix(int letter) const {
  const int idx = std::abs(letter) - 1;
  if (idx < 0 || idx >= rank()) throw std::out_of_range("letter outside the generator range");
  return letter > 0 ? generators[idx] : generators[idx].inverse();
}

Moebius SchottkyFactor::word_matrix(const Word& w) const {
  Moebius m = Moebius::identity();
  for (int i = 0; i < w.size(); ++i) m = m * letter_matrix(w[i]);
  return m;
}

SchottkyFactor reference_factor() {
  SchottkyFactor f;
  f.generators = {Moebius{2.0, 0.0, 0.0, 0.5}, Moebius{2.0, 3.0, 1.0, 2.0}};
  f.disks = {PairingDisks{Disk{0.0, 3.6, true}, Disk{0.0, 0.9, false}},
             PairingDisks{Disk{2.0, 1.0, false}, Disk{-2.0, 1.0, false}}};
  return f;
}

SchottkyFactor thin_factor(double dilation_length, double length) {
  SchottkyFactor f;
  const Moebius h = Moebius::symmetric_hyperbolic(1.0, length);
  f.generators = {Moebius::dilation(std::exp(dilation_length)), h};
  // Isometric circles of h and its inverse: centers -+coth(l/2), radius 1/sinh(l/2).
  const double center = 1.0 / std::tanh(0.5 * length);
  const double radius = 1.0 / std::sinh(0.5 * length);
  // Split the gap between the h-disks and 0 (resp. infinity) evenly on a log scale.
  const double lo = center - radius, hi = center + radius;
  const double inner = std::sqrt(lo * hi) * std::exp(-0.5 * dilation_length);
  f.disks = {PairingDisks{Disk{0.0, inner * std::exp(dilation_length), true}, Disk{0.0, inner, false}},
             PairingDisks{Disk{center, radius, false}, Disk{-center, radius, false}}};
  return f;
}

SchottkyFactor cyclic_factor() {
  SchottkyFactor f;
  f.generators = {Moebius{2.0, 0.0, 0.0, 0.5}};
  f.disks = {PairingDisks{Disk{0.0, 3.6, true}, Disk{0.0, 0.9, false}}};
  return f;
}

SchottkyFactor trivial_factor() { return {}; }

// ---------------------------------------------------------------- certification

bool CertificateReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool same_boundary(const HBoundaryPoint& a, const HBoundaryPoint& b) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return std::abs(a.value() - b.value()) <= 1e-9 * std::max({1.0, std::abs(a.value()), std::abs(b.value())});
}

std::string describe(const HBoundaryPoint& p) { return p.is_infinite() ? "inf" : fmt_num(p.value()); }

bool disks_disjoint(const Disk& a, const Disk& b) {
  if (a.exterior && b.exterior) return false;
  if (!a.exterior && !b.exterior) return std::abs(a.center - b.center) > a.radius + b.radius;
  const Disk& in = a.exterior ? b : a;
  const Disk& out = a.exterior ? a : b;
  return std::abs(in.center - out.center) + in.radius < out.radius;
}

const Disk& target_disk(const SchottkyFactor& f, int letter) {
  const auto& pd = f.disks[std::abs(letter) - 1];
  return letter > 0 ? pd.attracting : pd.repelling;
}

// A point of the upper half-plane strictly inside the disk.
HPoint inner_point(const Disk& d) {
  return d.exterior ? HPoint{d.center, 2.0 * d.radius} : HPoint{d.center, 0.5 * d.radius};
}

}  // namespace

CertificateReport certify(const SchottkyFactor& f, const std::string& label) {
  CertificateReport rep;
  const int k = f.rank();

  CertificateCheck rank{label + ": at least two generators", k >= 2, ""};
  if (!rank.passed) rank.witness = "rank " + std::to_string(k);
  rep.checks.push_back(rank);

  CertificateCheck hyper{label + ": generators hyperbolic", true, ""};
  std::vector<std::pair<int, HBoundaryPoint>> fixed;
  for (int i = 0; i < k; ++i) {
    const auto kind = classify(f.generators[i]);
    if (kind != IsometryKind::Hyperbolic) {
      hyper.passed = false;
      if (!hyper.witness.empty()) hyper.witness += "; ";
      hyper.witness += "generator " + std::to_string(i + 1) + " " + to_string(kind) +
                       ", |tr| = " + fmt_num(std::abs(f.generators[i].trace()));
      continue;
    }
    const auto [plus, minus] = fixed_points(f.generators[i]);
    fixed.emplace_back(i + 1, plus);
    fixed.emplace_back(i + 1, minus);
  }
  rep.checks.push_back(hyper);

  CertificateCheck indep{label + ": fixed points pairwise distinct", true, ""};
  for (std::size_t a = 0; a < fixed.size() && indep.passed; ++a) {
    for (std::size_t b = a + 1; b < fixed.size(); ++b) {
      if (fixed[a].first != fixed[b].first && same_boundary(fixed[a].second, fixed[b].second)) {
        indep.passed = false;
        indep.witness = "generators " + std::to_string(fixed[a].first) + " and " +
                        std::to_string(fixed[b].first) + " share fixed point " +
                        describe(fixed[a].second);
        break;
      }
    }
  }
  rep.checks.push_back(indep);

  CertificateCheck count{label + ": one disk pair per generator",
                         static_cast<int>(f.disks.size()) == k, ""};
  if (!count.passed) count.witness = std::to_string(f.disks.size()) + " disk pairs";
  rep.checks.push_back(count);
  if (!count.passed) return rep;

  std::vector<std::pair<std::string, Disk>> all;
  for (int i = 0; i < k; ++i) {
    all.emplace_back("D(" + std::to_string(i + 1) + ")", f.disks[i].attracting);
    all.emplace_back("D(" + std::to_string(-(i + 1)) + ")", f.disks[i].repelling);
  }
  CertificateCheck disjoint{label + ": pairing disks disjoint", true, ""};
  for (std::size_t a = 0; a < all.size() && disjoint.passed; ++a) {
    if (!(all[a].second.radius > 0.0)) {
      disjoint.passed = false;
      disjoint.witness = all[a].first + " has non-positive radius";
      break;
    }
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      if (!disks_disjoint(all[a].second, all[b].second)) {
        disjoint.passed = false;
        disjoint.witness = all[a].first + " meets " + all[b].first;
        break;
      }
    }
  }
  rep.checks.push_back(disjoint);

  // Letter l must carry the outside of D(-l) into D(l). A Moebius map sends the
  // boundary circle of D(-l) to a circle, so sampling that circle plus one
  // interior point of the outside fixes the image region.
  CertificateCheck pingpong{label + ": ping-pong", true, ""};
  for (int i = 1; i <= k && pingpong.passed; ++i) {
    for (int letter : {i, -i}) {
      const Moebius& m = letter > 0 ? f.generators[i - 1] : f.generators[i - 1].inverse();
      const Disk& source = target_disk(f, -letter);
      const Disk& target = target_disk(f, letter);
      for (int s = 0; s < kPingPongSamples; ++s) {
        const double phi = std::numbers::pi * (s + 0.5) / kPingPongSamples;
        const HPoint z{source.center + source.radius * std::cos(phi), source.radius * std::sin(phi)};
        if (!target.contains(apply(m, z))) {
          pingpong.passed = false;
          pingpong.witness = "letter " + std::to_string(letter) + " maps boundary sample " +
                             std::to_string(s) + " outside its disk";
          break;
        }
      }
      if (pingpong.passed && !target.contains(apply(m, inner_point(target)))) {
        pingpong.passed = false;
        pingpong.witness = "letter " + std::to_string(letter) + " reverses the disk orientation";
      }
      if (!pingpong.passed) break;
    }
  }
  rep.checks.push_back(pingpong);
  return rep;
}

CertificateReport certify(const ProductGroup& group) {
  CertificateReport rep = certify(group.factor1, "factor1");
  const auto second = certify(group.factor2, "factor2");
  rep.checks.insert(rep.checks.end(), second.checks.begin(), second.checks.end());
  if (group.coupling == Coupling::Diagonal) {
    CertificateCheck eq{"diagonal coupling: equal ranks",
                        group.factor1.rank() == group.factor2.rank(), ""};
    if (!eq.passed) {
      eq.witness = std::to_string(group.factor1.rank()) + " vs " + std::to_string(group.factor2.rank());
    }
    rep.checks.push_back(eq);
  }
  return rep;
}

// ---------------------------------------------------------------- bounds

namespace {

constexpr int kScanDepth = 6;
constexpr double kRelaxation = 0.8;

std::vector<int> alphabet(int rank) {
  std::vector<int> out;
  for (int i = 1; i <= rank; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;
}

struct ScanState {
  double min_rate = INFINITY;
  std::vector<std::pair<int, double>> lengths;  // (|w|, d)
  double max_drop = 0.0;
};

void scan(const SchottkyFactor& f, const HPoint& o, const std::vector<int>& letters, int last,
          int depth, const Moebius& m, double best_prefix, ScanState& st) {
  for (int l : letters) {
    if (l == -last) continue;
    const Moebius next = m * f.letter_matrix(l);
    const double d = h_distance(o, apply(next, o));
    st.lengths.emplace_back(depth + 1, d);
    st.max_drop = std::max(st.max_drop, best_prefix - d);
    if (depth + 1 == kScanDepth) {
      st.min_rate = std::min(st.min_rate, d / kScanDepth);
    } else {
      scan(f, o, letters, l, depth + 1, next, std::max(best_prefix, d), st);
    }
  }
}

}  // namespace

int FactorBounds::word_length_cutoff(double radius) const {
  if (lambda_min <= 0.0) return 0;
  return static_cast<int>(std::ceil((radius + offset) / lambda_min));
}

double FactorBounds::prune_margin() const { return max_drop / kRelaxation + 0.25; }

FactorBounds estimate_bounds(const SchottkyFactor& f, const HPoint& o) {
  FactorBounds b;
  if (f.rank() == 0) return b;
  ScanState st;
  scan(f, o, alphabet(f.rank()), 0, 0, Moebius::identity(), 0.0, st);
  if (!(st.min_rate > 0.0)) throw std::runtime_error("factor shows no displacement growth");
  b.lambda_min = kRelaxation * st.min_rate;
  for (const auto& [len, d] : st.lengths) b.offset = std::max(b.offset, b.lambda_min * len - d);
  b.max_drop = st.max_drop;
  return b;
}

// ---------------------------------------------------------------- enumeration

AtomBudgetExceeded::AtomBudgetExceeded(std::size_t reached_, std::size_t budget)
    : std::runtime_error("orbit ball holds more than " + std::to_string(budget) +
                         " atoms (reached " + std::to_string(reached_) + "); lower R"),
      reached(reached_) {}

namespace {

struct FactorWalk {
  const SchottkyFactor& f;
  const HPoint& o;
  double radius;
  int cutoff;
  double margin;
  std::size_t budget;
  std::vector<int> letters;
  std::vector<FactorAtom> out;

  void visit(Word& w, const Moebius& m) {
    const HPoint p = apply(m, o);
    const double d = h_distance(o, p);
    if (d <= radius) {
      out.push_back({w, m, p, d});
      if (out.size() > budget) throw AtomBudgetExceeded(out.size(), budget);
    }
    if (w.size() >= cutoff || d > radius + margin) return;
    for (int l : letters) {
      if (!w.empty() && l == -w.back()) continue;
      if (w.size() == Word::kMaxLength) {
        throw std::length_error("word tree deeper than the stored word length; lower R");
      }
      w.push_back(l);
      visit(w, m * f.letter_matrix(l));
      w.pop_back();
    }
  }
};

template <class T, class Less>
void sort_atoms(std::vector<T>& v, Less less) {
  std::sort(v.begin(), v.end(), less);
}

// Runs `task(i)` for i in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(int n, int threads, F task) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += threads) task(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<FactorAtom> factor_ball_impl(const SchottkyFactor& f, const HPoint& o, double radius,
                                         std::size_t max_atoms, int threads) {
  std::vector<FactorAtom> out{{Word{}, Moebius::identity(), o, 0.0}};
  if (f.rank() == 0) return out;
  const FactorBounds b = estimate_bounds(f, o);
  const auto letters = alphabet(f.rank());
  const int cutoff = b.word_length_cutoff(radius);
  if (cutoff == 0) return out;
  std::vector<std::vector<FactorAtom>> parts(letters.size());
  parallel_for(static_cast<int>(letters.size()), threads, [&](int i) {
    FactorWalk walk{f, o, radius, cutoff, b.prune_margin(), max_atoms, letters, {}};
    Word w;
    w.push_back(letters[i]);
    walk.visit(w, f.letter_matrix(letters[i]));
    parts[i] = std::move(walk.out);
  });
  for (auto& p : parts) {
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    if (out.size() > max_atoms) throw AtomBudgetExceeded(out.size(), max_atoms);
  }
  sort_atoms(out, [](const FactorAtom& a, const FactorAtom& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.word < b.word;
  });
  return out;
}

bool atom_less(const OrbitAtom& a, const OrbitAtom& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  if (a.word1 != b.word1) return a.word1 < b.word1;
  return a.word2 < b.word2;
}

struct DiagonalWalk {
  const ProductGroup& g;
  const PPoint& o;
  double radius;
  int cutoff;
  double margin1, margin2;
  std::size_t budget;
  std::vector<int> letters;
  std::vector<OrbitAtom> out;

  void visit(Word& w, const Moebius& m1, const Moebius& m2) {
    const PPoint p{apply(m1, o.p1), apply(m2, o.p2)};
    const DistanceVector h = distance_vector(o, p);
    if (h.norm() <= radius) {
      out.push_back(make_atom(w, w, o, p));
      if (out.size() > budget) throw AtomBudgetExceeded(out.size(), budget);
    }
    const double lo1 = std::max(0.0, h.h1 - margin1);
    const double lo2 = std::max(0.0, h.h2 - margin2);
    if (w.size() >= cutoff || std::hypot(lo1, lo2) > radius) return;
    for (int l : letters) {
      if (!w.empty() && l == -w.back()) continue;
      if (w.size() == Word::kMaxLength) {
        throw std::length_error("word tree deeper than the stored word length; lower R");
      }
      w.push_back(l);
      visit(w, m1 * g.factor1.letter_matrix(l), m2 * g.factor2.letter_matrix(l));
      w.pop_back();
    }
  }
};

}  // namespace

std::vector<FactorAtom> factor_ball(const SchottkyFactor& f, const HPoint& o, double radius,
                                    std::size_t max_atoms) {
  return factor_ball_impl(f, o, radius, max_atoms, 1);
}

OrbitAtom make_atom(const Word& w1, const Word& w2, const PPoint& o, const PPoint& point) {
  OrbitAtom a;
  a.word1 = w1;
  a.word2 = w2;
  a.point = point;
  a.hvec = distance_vector(o, point);
  a.dist = a.hvec.norm();
  a.slope = slope_of(a.hvec);
  if (!(point.p1 == o.p1)) a.bnd1 = ray_endpoint(o.p1, point.p1);
  if (!(point.p2 == o.p2)) a.bnd2 = ray_endpoint(o.p2, point.p2);
  return a;
}

PIsometry element_of(const ProductGroup& group, const OrbitAtom& atom) {
  return {group.factor1.word_matrix(atom.word1), group.factor2.word_matrix(atom.word2)};
}

std::vector<OrbitAtom> orbit_ball(const ProductGroup& group, const PPoint& o, double radius,
                                  std::size_t max_atoms, int threads) {
  if (!(radius > 0.0)) throw std::invalid_argument("orbit_ball: R must be positive");
  std::vector<OrbitAtom> out;

  if (group.coupling == Coupling::FullProduct) {
    const auto b1 = factor_ball_impl(group.factor1, o.p1, radius, max_atoms, threads);
    const auto b2 = factor_ball_impl(group.factor2, o.p2, radius, max_atoms, threads);
    std::size_t total = 0;
    for (const auto& a : b1) {
      for (const auto& b : b2) {
        if (std::hypot(a.dist, b.dist) > radius) break;
        ++total;
      }
      if (total > max_atoms) throw AtomBudgetExceeded(total, max_atoms);
    }
    out.reserve(total);
    for (const auto& a : b1) {
      for (const auto& b : b2) {
        if (std::hypot(a.dist, b.dist) > radius) break;
        out.push_back(make_atom(a.word, b.word, o, PPoint{a.point, b.point}));
      }
    }
  } else {
    if (group.factor1.rank() != group.factor2.rank()) {
      throw std::invalid_argument("diagonal coupling needs equal generator counts");
    }
    out.push_back(make_atom(Word{}, Word{}, o, o));
    if (group.factor1.rank() > 0) {
      const FactorBounds f1 = estimate_bounds(group.factor1, o.p1);
      const FactorBounds f2 = estimate_bounds(group.factor2, o.p2);
      const int cutoff = std::min(f1.word_length_cutoff(radius), f2.word_length_cutoff(radius));
      const auto letters = alphabet(group.factor1.rank());
      std::vector<std::vector<OrbitAtom>> parts(letters.size());
      parallel_for(static_cast<int>(letters.size()), threads, [&](int i) {
        DiagonalWalk walk{group, o, radius, cutoff, f1.prune_margin(), f2.prune_margin(),
                          max_atoms, letters, {}};
        if (cutoff == 0) return;
        Word w;
        w.push_back(letters[i]);
        walk.visit(w, group.factor1.letter_matrix(letters[i]),
                   group.factor2.letter_matrix(letters[i]));
        parts[i] = std::move(walk.out);
      });
      for (auto& p : parts) {
        out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
        if (out.size() > max_atoms) throw AtomBudgetExceeded(out.size(), max_atoms);
      }
    }
  }
  sort_atoms(out, atom_less);
  return out;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string num17(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

void write_bnd(std::ostream& os, const std::optional<HBoundaryPoint>& b) {
  if (b && b->is_finite()) {
    os << "F," << num17(b->value());
  } else {
    os << "INF,";
  }
}

std::optional<HBoundaryPoint> read_bnd(std::string_view kind, std::string_view val, double h) {
  if (kind == "F") return HBoundaryPoint::finite(parse_double(val));
  if (kind != "INF") throw std::invalid_argument("boundary kind must be F or INF");
  if (!val.empty()) throw std::invalid_argument("INF boundary carries a value");
  if (h == 0.0) return std::nullopt;
  return HBoundaryPoint::infinity();
}

}  // namespace

void save_orbit(const std::vector<OrbitAtom>& atoms, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw OrbitFileError("cannot open " + path.string() + " for writing");
  os << kOrbitCsvHeader << '\n';
  for (const auto& a : atoms) {
    os << a.word1.to_string() << ',' << a.word2.to_string() << ',' << num17(a.dist) << ','
       << num17(a.hvec.h1) << ',' << num17(a.hvec.h2) << ',' << num17(a.slope.value()) << ',';
    write_bnd(os, a.bnd1);
    os << ',';
    write_bnd(os, a.bnd2);
    os << ',' << num17(a.point.p1.re()) << ',' << num17(a.point.p1.im()) << ','
       << num17(a.point.p2.re()) << ',' << num17(a.point.p2.im()) << '\n';
  }
  if (!os) throw OrbitFileError("write failed for " + path.string());
}

std::vector<OrbitAtom> load_orbit(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw OrbitFileError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw OrbitFileError(path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kOrbitCsvHeader) throw OrbitFileError(path.string() + ": unexpected header");

  std::vector<OrbitAtom> atoms;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = [&] { return path.string() + ":" + std::to_string(lineno); };
    OrbitAtom a;
    try {
      const auto f = split_csv(line);
      if (f.size() != 14) throw std::invalid_argument("expected 14 fields, got " + std::to_string(f.size()));
      a.word1 = Word::parse(std::string(f[0]));
      a.word2 = Word::parse(std::string(f[1]));
      a.dist = parse_double(f[2]);
      a.hvec = {parse_double(f[3]), parse_double(f[4])};
      a.slope = Slope{parse_double(f[5])};
      a.bnd1 = read_bnd(f[6], f[7], a.hvec.h1);
      a.bnd2 = read_bnd(f[8], f[9], a.hvec.h2);
      a.point = {HPoint{parse_double(f[10]), parse_double(f[11])},
                 HPoint{parse_double(f[12]), parse_double(f[13])}};
    } catch (const std::exception& e) {
      throw OrbitFileError(where() + ": parse error: " + e.what());
    }
    if (std::abs(a.dist - a.hvec.norm()) > 1e-9) {
      throw OrbitFileError(where() + ": integrity error: dist differs from |hvec|");
    }
    if (std::abs(a.slope.value() - slope_of(a.hvec).value()) > 1e-9) {
      throw OrbitFileError(where() + ": integrity error: slope inconsistent with hvec");
    }
    atoms.push_back(a);
  }
  return atoms;
}

}  // namespace hyperlab

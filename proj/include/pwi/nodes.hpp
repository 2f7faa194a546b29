#pragma once

// Complete interpolating sequences for the band square S_delta = [-delta, delta]^2,
// finite-section exponential Gram matrices and Riesz-constant estimates.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pwi/detail/format.hpp"
#include "pwi/errors.hpp"
#include "pwi/geometry.hpp"

namespace pwi {

class BandSquare {
 public:
  explicit BandSquare(double delta) : delta_(delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("BandSquare: delta must be positive");
  }
  double delta() const { return delta_; }
  double area() const { return 4.0 * delta_ * delta_; }
  /// Lattice spacing pi / delta of the exact CIS.
  double spacing() const { return kPi / delta_; }

 private:
  double delta_;
};

struct ExactLattice {
  friend bool operator==(const ExactLattice&, const ExactLattice&) = default;
};
struct Perturbed {
  double L = 0.0;
  std::uint64_t seed = 0;
  friend bool operator==(const Perturbed&, const Perturbed&) = default;
};
using NodeKind = std::variant<ExactLattice, Perturbed>;

/// Kadec-type admissible perturbation radius pi^-1 arccos((1 - 9^(1-n)) / sqrt 2) - 1/4.
inline double kadec_bound(int n) {
  if (n < 1) throw InvalidArgument("kadec_bound: dimension must be >= 1");
  const double c = (1.0 - std::pow(9.0, 1.0 - n)) / std::sqrt(2.0);
  return std::acos(c) / kPi - 0.25;
}

/// Relaxed radius asserted admissible in two dimensions beyond the formula's value.
inline constexpr double kRelaxedPerturbationBound = 1.0 / 20.0;

struct PerturbationPolicy {
  /// Accept kadec_bound(2) <= L <= 1/20.
  bool allow_relaxed = false;
};

/// Indexed family of 2D sampling nodes tied to S_delta. Immutable after construction.
class NodeSet {
 public:
  NodeSet(double delta, int window, NodeKind kind, std::vector<LatticeIndex> indices,
          std::vector<Point2> points)
      : square_(delta), window_(window), kind_(kind), indices_(std::move(indices)),
        points_(std::move(points)) {
    validate();
  }

  double delta() const { return square_.delta(); }
  const BandSquare& square() const { return square_; }
  int window() const { return window_; }
  const NodeKind& kind() const { return kind_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point2>& points() const { return points_; }
  const std::vector<LatticeIndex>& indices() const { return indices_; }
  Point2 point(std::size_t i) const { return points_[i]; }
  LatticeIndex index(std::size_t i) const { return indices_[i]; }

  std::optional<std::size_t> find(LatticeIndex j) const {
    auto it = std::find(indices_.begin(), indices_.end(), j);
    if (it == indices_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - indices_.begin());
  }

  /// Same nodes, reordered: entry i of the result is entry order[i] of this set.
  NodeSet permuted(const std::vector<std::size_t>& order) const {
    if (order.size() != size()) throw InvalidArgument("NodeSet::permuted: order has wrong length");
    std::vector<LatticeIndex> idx;
    std::vector<Point2> pts;
    for (auto k : order) {
      idx.push_back(indices_.at(k));
      pts.push_back(points_.at(k));
    }
    return NodeSet(delta(), window_, kind_, std::move(idx), std::move(pts));
  }

  /// Nodes translated by a common offset. Provenance checks are relative to the shifted lattice.
  std::vector<Point2> shifted_points(Point2 offset) const {
    std::vector<Point2> out(points_);
    for (auto& p : out) p = p + offset;
    return out;
  }

  /// Smallest pairwise Euclidean distance (infinity for a single node).
  double min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (std::size_t k = i + 1; k < points_.size(); ++k) best = std::min(best, norm(points_[i] - points_[k]));
    return best;
  }

  /// Largest |x_j - (pi/delta) j| over the set.
  double max_displacement() const {
    double worst = 0.0;
    const double s = square_.spacing();
    for (std::size_t i = 0; i < size(); ++i) {
      const Point2 lattice{s * indices_[i].j1, s * indices_[i].j2};
      worst = std::max(worst, norm(points_[i] - lattice));
    }
    return worst;
  }

 private:
  void validate() const {
    if (window_ < 0) throw InvalidArgument("NodeSet: window must be >= 0");
    if (indices_.size() != points_.size()) throw InvalidArgument("NodeSet: index/point count mismatch");
    if (points_.empty()) throw InvalidArgument("NodeSet: empty node set");
    std::vector<LatticeIndex> sorted(indices_);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("NodeSet: duplicate lattice index");
    for (auto j : indices_)
      if (std::abs(j.j1) > window_ || std::abs(j.j2) > window_)
        throw InvalidArgument("NodeSet: index outside window");
    const double s = square_.spacing();
    if (std::holds_alternative<ExactLattice>(kind_)) {
      for (std::size_t i = 0; i < size(); ++i)
        if (points_[i] != Point2{s * indices_[i].j1, s * indices_[i].j2})
          throw InvalidArgument("NodeSet: exact-lattice node does not equal (pi/delta) j");
    } else {
      const double L = std::get<Perturbed>(kind_).L;
      if (!(L >= 0.0)) throw InvalidArgument("NodeSet: perturbation radius must be nonnegative");
      if (max_displacement() > s * L * (1.0 + 1e-12) + 1e-15)
        throw InvalidArgument("NodeSet: node displaced beyond (pi/delta) L");
    }
    auto pts = points_;
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
      throw InvalidArgument("NodeSet: nodes are not distinct");
  }

  BandSquare square_;
  int window_;
  NodeKind kind_;
  std::vector<LatticeIndex> indices_;
  std::vector<Point2> points_;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) keyed on (seed, j, counter); no hidden state.
inline double counter_uniform(std::uint64_t seed, LatticeIndex j, std::uint64_t counter) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint32_t>(j.j1));
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(j.j2)) << 1));
  h = mix64(h ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Point uniform in the unit disk by rejection; only exact arithmetic, so bit-reproducible.
inline Point2 unit_disk_sample(std::uint64_t seed, LatticeIndex j) {
  for (std::uint64_t c = 0;; c += 2) {
    const double u = 2.0 * counter_uniform(seed, j, c) - 1.0;
    const double v = 2.0 * counter_uniform(seed, j, c + 1) - 1.0;
    if (u * u + v * v <= 1.0) return {u, v};
  }
}

inline std::vector<LatticeIndex> window_indices(int window) {
  std::vector<LatticeIndex> out;
  out.reserve(static_cast<std::size_t>(2 * window + 1) * (2 * window + 1));
  for (int a = -window; a <= window; ++a)
    for (int b = -window; b <= window; ++b) out.push_back({a, b});
  return out;
}

}  // namespace detail

/// Exact lattice x_j = (pi/delta) j for j in {-W..W}^2, row-major in (j1, j2).
inline NodeSet generate_lattice(double delta, int window) {
  if (window < 0) throw InvalidArgument("generate_lattice: window must be >= 0");
  const BandSquare sq(delta);
  auto idx = detail::window_indices(window);
  std::vector<Point2> pts;
  pts.reserve(idx.size());
  for (auto j : idx) pts.push_back({sq.spacing() * j.j1, sq.spacing() * j.j2});
  return NodeSet(delta, window, ExactLattice{}, std::move(idx), std::move(pts));
}

/// Nodes x_j = (pi/delta)(j + eps_j), eps_j uniform in the disk of radius L.
inline NodeSet generate_perturbed(double delta, int window, double L, std::uint64_t seed,
                                  PerturbationPolicy policy = {}) {
  if (window < 0) throw InvalidArgument("generate_perturbed: window must be >= 0");
  if (!(L >= 0.0)) throw InvalidArgument("generate_perturbed: L must be nonnegative");
  const double strict = kadec_bound(2);
  if (L >= strict) {
    if (!policy.allow_relaxed)
      throw AdmissibilityError("generate_perturbed: L = " + detail::format_double(L) +
                               " is not below the Kadec-type bound " + detail::format_double(strict) +
                               "; the relaxed 1/20 radius needs the explicit override");
    if (L > kRelaxedPerturbationBound)
      throw AdmissibilityError("generate_perturbed: L = " + detail::format_double(L) +
                               " exceeds the relaxed radius 1/20");
  }
  const BandSquare sq(delta);
  auto idx = detail::window_indices(window);
  std::vector<Point2> pts;
  pts.reserve(idx.size());
  for (auto j : idx) {
    const Point2 e = detail::unit_disk_sample(seed, j);
    pts.push_back({sq.spacing() * (j.j1 + L * e.x), sq.spacing() * (j.j2 + L * e.y)});
  }
  return NodeSet(delta, window, Perturbed{L, seed}, std::move(idx), std::move(pts));
}

/// 2 sin(delta u) / u with the limit 2 delta at u = 0.
inline double box_transform_1d(double delta, double u) {
  if (u == 0.0) return 2.0 * delta;
  return 2.0 * std::sin(delta * u) / u;
}

/// Gram of the exponentials e^{i<., x_j>} over S_delta:
/// E(j,k) = int_{S_delta} e^{-i<xi, x_j - x_k>} dxi, real by symmetry of the square.
inline Eigen::MatrixXd exponential_gram(const NodeSet& nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const double d = nodes.delta();
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j, j) = 4.0 * d * d;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const Point2 u = nodes.point(j) - nodes.point(k);
      const double v = box_transform_1d(d, u.x) * box_transform_1d(d, u.y);
      e(j, k) = v;
      e(k, j) = v;
    }
  }
  return e;
}

struct RieszEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  /// max(sqrt(lambda_max), 1/sqrt(lambda_min)); a lower estimate of the true constant B.
  double b_hat = 1.0;
};

/// Extreme eigenvalues of a finite-section exponential Gram.
inline RieszEstimate riesz_estimate(const Eigen::MatrixXd& gram) {
  if (gram.rows() == 0 || gram.rows() != gram.cols()) throw InvalidArgument("riesz_estimate: need a square, nonempty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DegenerateSection("riesz_estimate: eigenvalue iteration failed");
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  const double tol = static_cast<double>(gram.rows()) * std::numeric_limits<double>::epsilon() * std::abs(hi);
  if (!(lo > tol))
    throw DegenerateSection("riesz_estimate: smallest eigenvalue " + detail::format_double(lo) +
                            " is below working precision; the section is numerically degenerate");
  return {lo, hi, std::max(std::sqrt(hi), 1.0 / std::sqrt(lo))};
}

// ---------------------------------------------------------------------------
// Node file: "# key = value" header comments, then "j1 j2 x y" per line.

inline void write_node_file(std::ostream& out, const NodeSet& nodes) {
  using detail::format_double;
  out << "# delta = " << format_double(nodes.delta()) << '\n';
  out << "# window = " << nodes.window() << '\n';
  if (const auto* p = std::get_if<Perturbed>(&nodes.kind())) {
    out << "# kind = perturbed\n";
    out << "# L = " << format_double(p->L) << '\n';
    out << "# seed = " << p->seed << '\n';
  } else {
    out << "# kind = lattice\n";
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto j = nodes.index(i);
    const auto x = nodes.point(i);
    out << j.j1 << ' ' << j.j2 << ' ' << format_double(x.x) << ' ' << format_double(x.y) << '\n';
  }
}

inline NodeSet read_node_file(std::istream& in) {
  std::map<std::string, std::string> header;
  std::vector<LatticeIndex> idx;
  std::vector<Point2> pts;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw InvalidArgument("node file line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto body = detail::trim(t.substr(1));
      auto eq = body.find('=');
      if (eq != std::string_view::npos)
        header[std::string(detail::trim(body.substr(0, eq)))] = std::string(detail::trim(body.substr(eq + 1)));
      continue;
    }
    std::istringstream fields{std::string(t)};
    std::string a, b, c, d, extra;
    if (!(fields >> a >> b >> c >> d) || (fields >> extra)) fail("expected 'j1 j2 x y'");
    auto j1 = detail::parse_int<int>(a), j2 = detail::parse_int<int>(b);
    auto x = detail::parse_double(c), y = detail::parse_double(d);
    if (!j1 || !j2 || !x || !y) fail("malformed number");
    idx.push_back({*j1, *j2});
    pts.push_back({*x, *y});
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw InvalidArgument(std::string("node file: missing header '") + key + "'");
    return it->second;
  };
  const auto delta = detail::parse_double(need("delta"));
  const auto window = detail::parse_int<int>(need("window"));
  if (!delta || !window) throw InvalidArgument("node file: malformed delta/window header");
  NodeKind kind = ExactLattice{};
  const auto& k = need("kind");
  if (k == "perturbed") {
    auto L = detail::parse_double(need("L"));
    auto seed = detail::parse_int<std::uint64_t>(need("seed"));
    if (!L || !seed) throw InvalidArgument("node file: malformed L/seed header");
    kind = Perturbed{*L, *seed};
  } else if (k != "lattice") {
    throw InvalidArgument("node file: unknown kind '" + k + "'");
  }
  return NodeSet(*delta, *window, kind, std::move(idx), std::move(pts));
}

}  // namespace pwi

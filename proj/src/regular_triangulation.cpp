#include "coverax/regular_triangulation.hpp"

#include "coverax/mesh.hpp"
#include "coverax/predicates.hpp"

#include <algorithm>
#include <optional>

namespace coverax {

namespace {

constexpr int kInfinite = -1;
constexpr double kPerturbation = 1e-9;
constexpr int kMaxAttempts = 4;

struct Degenerate {};

struct Cell {
  std::array<int, 4> v;
  std::array<int, 4> n{-1, -1, -1, -1};
  bool alive = true;
};

class Builder {
 public:
  Builder(const Points& positions, const Eigen::VectorXd& weights)
      : pos_(positions), w_(weights), stamp_(0) {}

  void run(const std::array<int, 4>& simplex) {
    init(simplex);
    const int n = static_cast<int>(pos_.cols());
    for (int p = 0; p < n; ++p) {
      if (std::find(simplex.begin(), simplex.end(), p) != simplex.end()) continue;
      insert(p);
    }
  }

  std::vector<Tetrahedron> finite_cells() const {
    std::vector<Tetrahedron> out;
    for (const Cell& c : cells_) {
      if (!c.alive || is_infinite(c)) continue;
      Tetrahedron t{c.v[0], c.v[1], c.v[2], c.v[3]};
      std::sort(t.begin(), t.end());
      out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Eigen::Index> unused_vertices() const {
    std::vector<bool> used(static_cast<std::size_t>(pos_.cols()), false);
    for (const Cell& c : cells_) {
      if (!c.alive) continue;
      for (int v : c.v) {
        if (v != kInfinite) used[static_cast<std::size_t>(v)] = true;
      }
    }
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (!used[i]) out.push_back(static_cast<Eigen::Index>(i));
    }
    return out;
  }

 private:
  static bool is_infinite(const Cell& c) {
    return std::find(c.v.begin(), c.v.end(), kInfinite) != c.v.end();
  }

  Vec3 at(int i) const { return pos_.col(i); }

  // Orientation of a vertex quadruple with the infinite vertex replaced by q.
  int orient(const std::array<int, 4>& v, int q) const {
    std::array<int, 4> r = v;
    for (int& x : r) {
      if (x == kInfinite) x = q;
    }
    return predicates::orient3d(at(r[0]), at(r[1]), at(r[2]), at(r[3]));
  }

  bool in_conflict(const Cell& c, int p) const {
    if (is_infinite(c)) {
      const int o = orient(c.v, p);
      if (o == 0) throw Degenerate{};
      return o > 0;
    }
    const auto& v = c.v;
    const int s = predicates::power_test(at(v[0]), w_(v[0]), at(v[1]), w_(v[1]), at(v[2]), w_(v[2]),
                                         at(v[3]), w_(v[3]), at(p), w_(p));
    if (s == 0) throw Degenerate{};
    return s < 0;
  }

  int add_cell(const std::array<int, 4>& v) {
    cells_.push_back(Cell{v});
    tested_.push_back(0);
    conflict_.push_back(false);
    return static_cast<int>(cells_.size()) - 1;
  }

  // Matches the faces of the given cells that are still unlinked.
  void link_internal(const std::vector<int>& ids) {
    struct Face {
      std::array<int, 3> key;
      int cell, slot;
    };
    std::vector<Face> faces;
    for (int id : ids) {
      for (int s = 0; s < 4; ++s) {
        if (cells_[static_cast<std::size_t>(id)].n[static_cast<std::size_t>(s)] >= 0) continue;
        std::array<int, 3> key;
        int k = 0;
        for (int t = 0; t < 4; ++t) {
          if (t != s) key[static_cast<std::size_t>(k++)] = cells_[static_cast<std::size_t>(id)].v[static_cast<std::size_t>(t)];
        }
        std::sort(key.begin(), key.end());
        faces.push_back({key, id, s});
      }
    }
    std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) { return a.key < b.key; });
    for (std::size_t f = 0; f + 1 < faces.size(); ++f) {
      if (faces[f].key != faces[f + 1].key) continue;
      cells_[static_cast<std::size_t>(faces[f].cell)].n[static_cast<std::size_t>(faces[f].slot)] = faces[f + 1].cell;
      cells_[static_cast<std::size_t>(faces[f + 1].cell)].n[static_cast<std::size_t>(faces[f + 1].slot)] = faces[f].cell;
      ++f;
    }
  }

  void init(std::array<int, 4> s) {
    if (predicates::orient3d(at(s[0]), at(s[1]), at(s[2]), at(s[3])) < 0) std::swap(s[0], s[1]);
    const int root = add_cell(s);
    std::vector<int> ids{root};
    for (int slot = 0; slot < 4; ++slot) {
      std::array<int, 4> v = s;
      v[static_cast<std::size_t>(slot)] = kInfinite;
      // Flip orientation so that the infinite vertex acts as a point beyond
      // the hull facet.
      const int a = slot == 0 ? 1 : 0;
      const int b = (slot == 0 || slot == 1) ? 2 : 1;
      std::swap(v[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(b)]);
      const int id = add_cell(v);
      ids.push_back(id);
    }
    link_internal(ids);
  }

  void insert(int p) {
    ++stamp_;
    // Locate one conflicting cell, most recently created first.
    int seed = -1;
    for (int id = static_cast<int>(cells_.size()) - 1; id >= 0; --id) {
      if (!cells_[static_cast<std::size_t>(id)].alive) continue;
      if (in_conflict(cells_[static_cast<std::size_t>(id)], p)) {
        seed = id;
        break;
      }
    }
    if (seed < 0) return;  // redundant point

    mark(seed, true);
    std::vector<int> region{seed};
    std::vector<std::pair<int, int>> boundary;  // (conflict cell, slot)
    for (std::size_t q = 0; q < region.size(); ++q) {
      const int id = region[q];
      for (int s = 0; s < 4; ++s) {
        const int nb = cells_[static_cast<std::size_t>(id)].n[static_cast<std::size_t>(s)];
        if (tested_[static_cast<std::size_t>(nb)] != stamp_) {
          mark(nb, in_conflict(cells_[static_cast<std::size_t>(nb)], p));
          if (conflict_[static_cast<std::size_t>(nb)]) region.push_back(nb);
        }
        if (!conflict_[static_cast<std::size_t>(nb)]) boundary.emplace_back(id, s);
      }
    }

    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& [id, s] : boundary) {
      std::array<int, 4> v = cells_[static_cast<std::size_t>(id)].v;
      v[static_cast<std::size_t>(s)] = p;
      if (std::find(v.begin(), v.end(), kInfinite) == v.end() &&
          predicates::orient3d(at(v[0]), at(v[1]), at(v[2]), at(v[3])) <= 0) {
        throw Degenerate{};
      }
      const int outside = cells_[static_cast<std::size_t>(id)].n[static_cast<std::size_t>(s)];
      const int nid = add_cell(v);
      cells_[static_cast<std::size_t>(nid)].n[static_cast<std::size_t>(s)] = outside;
      for (int& back : cells_[static_cast<std::size_t>(outside)].n) {
        if (back == id) back = nid;
      }
      created.push_back(nid);
    }
    for (int id : region) cells_[static_cast<std::size_t>(id)].alive = false;
    link_internal(created);
  }

  void mark(int id, bool conflict) {
    tested_[static_cast<std::size_t>(id)] = stamp_;
    conflict_[static_cast<std::size_t>(id)] = conflict;
  }

  const Points& pos_;
  const Eigen::VectorXd& w_;
  std::vector<Cell> cells_;
  std::vector<std::uint64_t> tested_;
  std::vector<bool> conflict_;
  std::uint64_t stamp_;
};

bool exactly_equal(const Vec3& a, const Vec3& b) { return (a.array() == b.array()).all(); }

bool collinear(const Vec3& a, const Vec3& b, const Vec3& c) {
  // Collinear iff every point lifted off the line's plane family is coplanar
  // with the three; test against the three axis offsets.
  for (int k = 0; k < 3; ++k) {
    Vec3 off = a;
    off[k] += 1.0;
    if (predicates::orient3d(a, b, c, off) != 0) return false;
  }
  return true;
}

std::optional<std::array<int, 4>> initial_simplex(const Points& pos) {
  const int n = static_cast<int>(pos.cols());
  if (n < 4) return std::nullopt;
  int i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < n && i1 < 0; ++i) {
    if (!exactly_equal(pos.col(0), pos.col(i))) i1 = i;
  }
  if (i1 < 0) return std::nullopt;
  for (int i = i1 + 1; i < n && i2 < 0; ++i) {
    if (!collinear(pos.col(0), pos.col(i1), pos.col(i))) i2 = i;
  }
  if (i2 < 0) return std::nullopt;
  for (int i = i2 + 1; i < n && i3 < 0; ++i) {
    if (predicates::orient3d(pos.col(0), pos.col(i1), pos.col(i2), pos.col(i)) != 0) i3 = i;
  }
  if (i3 < 0) return std::nullopt;
  return std::array<int, 4>{0, i1, i2, i3};
}

}  // namespace

RegularTriangulation regular_triangulation(std::span<const WeightedPoint> points,
                                           std::uint64_t perturbation_seed) {
  RegularTriangulation out;
  const auto n = static_cast<Eigen::Index>(points.size());
  out.positions.resize(3, n);
  out.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.positions.col(i) = points[static_cast<std::size_t>(i)].position;
    out.weights(i) = points[static_cast<std::size_t>(i)].weight;
  }
  const auto simplex = initial_simplex(out.positions);
  if (!simplex) {
    throw Error(ErrorCode::DegenerateInput,
                "regular triangulation needs at least four non-coplanar points");
  }

  const Points original = out.positions;
  const double diagonal = BoundingBox::of(original).diagonal();
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Builder builder(out.positions, out.weights);
    try {
      builder.run(*simplex);
      out.tetrahedra = builder.finite_cells();
      out.redundant = builder.unused_vertices();
      return out;
    } catch (const Degenerate&) {
      out.perturbed = true;
      out.perturbation_seed = derive_seed(perturbation_seed, static_cast<std::uint64_t>(attempt));
      out.perturbation_magnitude = kPerturbation * diagonal;
      Rng rng(out.perturbation_seed);
      out.positions = original;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (int k = 0; k < 3; ++k) out.positions(k, i) += out.perturbation_magnitude * rng.uniform(-1.0, 1.0);
      }
    }
  }
  throw Error(ErrorCode::DegenerateInput, "degenerate configuration survived perturbation");
}

}  // namespace coverax

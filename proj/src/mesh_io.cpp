#include "coverax/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

namespace coverax {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path.string() + ": " + what);
}

Points to_points(const std::vector<double>& xyz) {
  Points p(3, static_cast<Eigen::Index>(xyz.size() / 3));
  std::copy(xyz.begin(), xyz.end(), p.data());
  return p;
}

Eigen::Matrix3Xi to_triangles(const std::vector<int>& idx) {
  Eigen::Matrix3Xi t(3, static_cast<Eigen::Index>(idx.size() / 3));
  std::copy(idx.begin(), idx.end(), t.data());
  return t;
}

// Fan triangulation of a polygon.
void push_polygon(std::vector<int>& out, const std::vector<int>& poly) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    out.push_back(poly[0]);
    out.push_back(poly[k]);
    out.push_back(poly[k + 1]);
  }
}

TriangleMesh finish_mesh(const std::filesystem::path& path, std::vector<double> xyz,
                         std::vector<int> idx) {
  TriangleMesh mesh;
  mesh.vertices = to_points(xyz);
  mesh.triangles = to_triangles(idx);
  mesh.drop_degenerate();
  if (mesh.triangle_count() == 0) {
    throw Error(ErrorCode::EmptyShape, path.string() + ": no valid triangles");
  }
  return mesh;
}

TriangleMesh parse_obj(const std::filesystem::path& path, const std::string& text) {
  std::vector<double> xyz;
  std::vector<int> idx;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) parse_fail(path, "bad vertex on line " + std::to_string(line_no));
      xyz.insert(xyz.end(), {x, y, z});
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      const int nv = static_cast<int>(xyz.size() / 3);
      while (ls >> tok) {
        int v = 0;
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
        if (ec != std::errc() || ptr != head.data() + head.size() || v == 0) {
          parse_fail(path, "bad face index '" + tok + "' on line " + std::to_string(line_no));
        }
        poly.push_back(v > 0 ? v - 1 : nv + v);
      }
      if (poly.size() < 3) parse_fail(path, "face with < 3 vertices on line " + std::to_string(line_no));
      push_polygon(idx, poly);
    }
  }
  return finish_mesh(path, std::move(xyz), std::move(idx));
}

TriangleMesh parse_off(const std::filesystem::path& path, const std::string& text) {
  // Strip comments, then read as a token stream.
  std::string clean;
  clean.reserve(text.size());
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    clean.push_back(comment ? ' ' : c);
  }
  std::istringstream in(clean);
  std::string magic;
  in >> magic;
  if (magic != "OFF") parse_fail(path, "missing OFF header");
  long nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne) || nv < 0 || nf < 0) parse_fail(path, "bad OFF counts");
  std::vector<double> xyz(static_cast<std::size_t>(nv) * 3);
  for (auto& c : xyz) {
    if (!(in >> c)) parse_fail(path, "truncated vertex list");
  }
  std::vector<int> idx;
  for (long f = 0; f < nf; ++f) {
    int k = 0;
    if (!(in >> k) || k < 3) parse_fail(path, "bad face " + std::to_string(f));
    std::vector<int> poly(static_cast<std::size_t>(k));
    for (auto& v : poly) {
      if (!(in >> v)) parse_fail(path, "truncated face " + std::to_string(f));
    }
    // Trailing per-face colors are ignored by reading to end of line.
    std::string rest;
    std::getline(in, rest);
    push_polygon(idx, poly);
  }
  return finish_mesh(path, std::move(xyz), std::move(idx));
}

// ---------------------------------------------------------------- PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> ply_type(const std::string& name) {
  static const std::map<std::string, PlyType> table = {
      {"char", PlyType::Int8},     {"int8", PlyType::Int8},     {"uchar", PlyType::UInt8},
      {"uint8", PlyType::UInt8},   {"short", PlyType::Int16},   {"int16", PlyType::Int16},
      {"ushort", PlyType::UInt16}, {"uint16", PlyType::UInt16}, {"int", PlyType::Int32},
      {"int32", PlyType::Int32},   {"uint", PlyType::UInt32},   {"uint32", PlyType::UInt32},
      {"float", PlyType::Float32}, {"float32", PlyType::Float32}, {"double", PlyType::Float64},
      {"float64", PlyType::Float64}};
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
  // scalar values, row-major [row][property]; list properties stored separately
  std::vector<double> scalars;
  std::vector<std::vector<int>> lists;  // one list per row (first list property only)

  int index_of(const std::string& prop) const {
    for (std::size_t k = 0; k < properties.size(); ++k) {
      if (properties[k].name == prop) return static_cast<int>(k);
    }
    return -1;
  }
};

class PlyReader {
 public:
  PlyReader(const std::filesystem::path& path, const std::string& text) : path_(path), text_(text) {}

  std::vector<PlyElement> read() {
    parse_header();
    if (binary_) {
      read_binary();
    } else {
      read_ascii();
    }
    return std::move(elements_);
  }

 private:
  void parse_header() {
    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
      if (pos >= text_.size()) parse_fail(path_, "unterminated PLY header");
      auto nl = text_.find('\n', pos);
      if (nl == std::string::npos) nl = text_.size();
      std::string line = text_.substr(pos, nl - pos);
      pos = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    };
    if (next_line() != "ply") parse_fail(path_, "missing 'ply' magic");
    for (;;) {
      std::istringstream ls(next_line());
      std::string word;
      if (!(ls >> word)) continue;
      if (word == "end_header") break;
      if (word == "comment" || word == "obj_info") continue;
      if (word == "format") {
        std::string fmt;
        ls >> fmt;
        if (fmt == "ascii") {
          binary_ = false;
        } else if (fmt == "binary_little_endian") {
          binary_ = true;
        } else {
          parse_fail(path_, "unsupported PLY format '" + fmt + "'");
        }
      } else if (word == "element") {
        PlyElement e;
        if (!(ls >> e.name >> e.count)) parse_fail(path_, "bad element line");
        elements_.push_back(std::move(e));
      } else if (word == "property") {
        if (elements_.empty()) parse_fail(path_, "property before element");
        PlyProperty p;
        std::string type;
        ls >> type;
        if (type == "list") {
          std::string ct, it;
          ls >> ct >> it >> p.name;
          auto c = ply_type(ct);
          auto i = ply_type(it);
          if (!c || !i) parse_fail(path_, "bad list property types");
          p.is_list = true;
          p.count_type = *c;
          p.type = *i;
        } else {
          auto t = ply_type(type);
          if (!t) parse_fail(path_, "unknown property type '" + type + "'");
          p.type = *t;
          ls >> p.name;
        }
        elements_.back().properties.push_back(p);
      } else {
        parse_fail(path_, "unexpected header keyword '" + word + "'");
      }
    }
    body_ = pos;
  }

  void read_ascii() {
    std::istringstream in(text_.substr(body_));
    for (auto& e : elements_) {
      e.scalars.reserve(e.count * e.properties.size());
      for (std::size_t row = 0; row < e.count; ++row) {
        bool have_list = false;
        for (const auto& p : e.properties) {
          if (p.is_list) {
            long n = 0;
            if (!(in >> n) || n < 0) parse_fail(path_, "truncated list in element " + e.name);
            std::vector<int> values(static_cast<std::size_t>(n));
            for (auto& v : values) {
              double d;
              if (!(in >> d)) parse_fail(path_, "truncated list in element " + e.name);
              v = static_cast<int>(d);
            }
            if (!have_list) e.lists.push_back(std::move(values));
            have_list = true;
            e.scalars.push_back(0.0);
          } else {
            double d;
            if (!(in >> d)) parse_fail(path_, "truncated element " + e.name);
            e.scalars.push_back(d);
          }
        }
      }
    }
  }

  double read_value(PlyType t, std::size_t& pos) {
    const std::size_t n = ply_size(t);
    if (pos + n > text_.size()) parse_fail(path_, "truncated binary body");
    const char* src = text_.data() + pos;
    pos += n;
    switch (t) {
      case PlyType::Int8: { std::int8_t v; std::memcpy(&v, src, n); return v; }
      case PlyType::UInt8: { std::uint8_t v; std::memcpy(&v, src, n); return v; }
      case PlyType::Int16: { std::int16_t v; std::memcpy(&v, src, n); return v; }
      case PlyType::UInt16: { std::uint16_t v; std::memcpy(&v, src, n); return v; }
      case PlyType::Int32: { std::int32_t v; std::memcpy(&v, src, n); return v; }
      case PlyType::UInt32: { std::uint32_t v; std::memcpy(&v, src, n); return v; }
      case PlyType::Float32: { float v; std::memcpy(&v, src, n); return v; }
      case PlyType::Float64: { double v; std::memcpy(&v, src, n); return v; }
    }
    return 0.0;
  }

  void read_binary() {
    std::size_t pos = body_;
    for (auto& e : elements_) {
      e.scalars.reserve(e.count * e.properties.size());
      for (std::size_t row = 0; row < e.count; ++row) {
        bool have_list = false;
        for (const auto& p : e.properties) {
          if (p.is_list) {
            const double n = read_value(p.count_type, pos);
            if (n < 0) parse_fail(path_, "negative list length");
            std::vector<int> values(static_cast<std::size_t>(n));
            for (auto& v : values) v = static_cast<int>(read_value(p.type, pos));
            if (!have_list) e.lists.push_back(std::move(values));
            have_list = true;
            e.scalars.push_back(0.0);
          } else {
            e.scalars.push_back(read_value(p.type, pos));
          }
        }
      }
    }
  }

  const std::filesystem::path& path_;
  const std::string& text_;
  bool binary_ = false;
  std::size_t body_ = 0;
  std::vector<PlyElement> elements_;
};

const PlyElement* find_element(const std::vector<PlyElement>& elements, const std::string& name) {
  for (const auto& e : elements) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

struct PlyVertices {
  std::vector<double> xyz;
  std::vector<double> normals;
};

PlyVertices ply_vertices(const std::filesystem::path& path, const std::vector<PlyElement>& elements) {
  const PlyElement* v = find_element(elements, "vertex");
  if (!v) parse_fail(path, "no vertex element");
  const int ix = v->index_of("x"), iy = v->index_of("y"), iz = v->index_of("z");
  if (ix < 0 || iy < 0 || iz < 0) parse_fail(path, "vertex element lacks x/y/z");
  const int nx = v->index_of("nx"), ny = v->index_of("ny"), nz = v->index_of("nz");
  const bool has_normals = nx >= 0 && ny >= 0 && nz >= 0;
  const std::size_t stride = v->properties.size();
  PlyVertices out;
  out.xyz.reserve(v->count * 3);
  for (std::size_t r = 0; r < v->count; ++r) {
    const double* row = v->scalars.data() + r * stride;
    out.xyz.insert(out.xyz.end(), {row[ix], row[iy], row[iz]});
    if (has_normals) out.normals.insert(out.normals.end(), {row[nx], row[ny], row[nz]});
  }
  return out;
}

TriangleMesh parse_ply_mesh(const std::filesystem::path& path, const std::string& text) {
  auto elements = PlyReader(path, text).read();
  auto verts = ply_vertices(path, elements);
  const PlyElement* f = find_element(elements, "face");
  if (!f) parse_fail(path, "no face element");
  std::vector<int> idx;
  for (const auto& poly : f->lists) push_polygon(idx, poly);
  return finish_mesh(path, std::move(verts.xyz), std::move(idx));
}

OrientedPointCloud finish_cloud(const std::filesystem::path& path, const std::vector<double>& xyz,
                                const std::vector<double>& normals) {
  OrientedPointCloud cloud;
  cloud.points = to_points(xyz);
  if (cloud.size() < OrientedPointCloud::kMinPoints) {
    throw Error(ErrorCode::TooFewPoints,
                path.string() + ": " + std::to_string(cloud.size()) + " points, need at least 4");
  }
  if (!normals.empty()) {
    Points n = to_points(normals);
    for (Eigen::Index i = 0; i < n.cols(); ++i) {
      const double len = n.col(i).norm();
      if (!(len > 0.0)) parse_fail(path, "zero-length normal at point " + std::to_string(i));
      n.col(i) /= len;
    }
    cloud.normals = std::move(n);
  }
  return cloud;
}

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path, const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> values;
    double d;
    while (ls >> d) values.push_back(d);
    if (!ls.eof()) parse_fail(path, "non-numeric token on line " + std::to_string(line_no));
    if (!rows.empty() && rows.front().size() != values.size()) {
      parse_fail(path, "inconsistent column count on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

OrientedPointCloud parse_xyz(const std::filesystem::path& path, const std::string& text) {
  std::vector<double> xyz, normals;
  for (const auto& row : read_rows(path, text)) {
    if (row.size() != 3 && row.size() != 6) parse_fail(path, "expected 3 or 6 columns");
    xyz.insert(xyz.end(), row.begin(), row.begin() + 3);
    if (row.size() == 6) normals.insert(normals.end(), row.begin() + 3, row.end());
  }
  return finish_cloud(path, xyz, normals);
}

}  // namespace

BoundingBox BoundingBox::of(const Points& points) {
  BoundingBox box;
  if (points.cols() > 0) {
    box.min = points.rowwise().minCoeff();
    box.max = points.rowwise().maxCoeff();
  }
  return box;
}

double TriangleMesh::area(Eigen::Index t) const {
  const Vec3 a = corner(t, 0);
  return 0.5 * (corner(t, 1) - a).cross(corner(t, 2) - a).norm();
}

void TriangleMesh::drop_degenerate() {
  Eigen::Index kept = 0;
  const Eigen::Index nv = vertex_count();
  for (Eigen::Index t = 0; t < triangles.cols(); ++t) {
    const auto tri = triangles.col(t);
    const bool valid = (tri.array() >= 0).all() && (tri.array() < nv).all();
    if (valid && area(t) > kDegenerateArea) {
      triangles.col(kept++) = triangles.col(t);
    } else {
      ++dropped_degenerate;
    }
  }
  triangles.conservativeResize(3, kept);
}

FileFormat parse_format(std::string_view name) {
  const std::string s = lower(name);
  if (s == "obj") return FileFormat::Obj;
  if (s == "off") return FileFormat::Off;
  if (s == "ply") return FileFormat::Ply;
  if (s == "xyz") return FileFormat::Xyz;
  throw Error(ErrorCode::UsageError, "unknown format '" + std::string(name) + "'");
}

FileFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  if (!ext.empty() && ext[0] == '.') ext.erase(0, 1);
  return parse_format(ext);
}

bool is_mesh_format(FileFormat format) {
  return format == FileFormat::Obj || format == FileFormat::Off;
}

TriangleMesh load_mesh(const std::filesystem::path& path, FileFormat format) {
  const std::string text = read_file(path);
  switch (format) {
    case FileFormat::Obj: return parse_obj(path, text);
    case FileFormat::Off: return parse_off(path, text);
    case FileFormat::Ply: return parse_ply_mesh(path, text);
    case FileFormat::Xyz: break;
  }
  throw Error(ErrorCode::UsageError, "xyz is not a mesh format");
}

OrientedPointCloud load_point_cloud(const std::filesystem::path& path, FileFormat format) {
  const std::string text = read_file(path);
  switch (format) {
    case FileFormat::Xyz: return parse_xyz(path, text);
    case FileFormat::Ply: {
      auto elements = PlyReader(path, text).read();
      auto verts = ply_vertices(path, elements);
      return finish_cloud(path, verts.xyz, verts.normals);
    }
    default: break;
  }
  throw Error(ErrorCode::UsageError, "point clouds are read from xyz or ply");
}

bool ply_has_faces(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto elements = PlyReader(path, text).read();
  const PlyElement* f = find_element(elements, "face");
  return f && f->count > 0;
}

Eigen::MatrixXd read_columns(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto rows = read_rows(path, text);
  const Eigen::Index cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return out;
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
    out << "v " << mesh.vertices(0, i) << ' ' << mesh.vertices(1, i) << ' ' << mesh.vertices(2, i) << '\n';
  }
  for (Eigen::Index t = 0; t < mesh.triangle_count(); ++t) {
    out << "f " << mesh.triangles(0, t) + 1 << ' ' << mesh.triangles(1, t) + 1 << ' '
        << mesh.triangles(2, t) + 1 << '\n';
  }
}

void write_xyz(const std::filesystem::path& path, const Points& points,
               const Eigen::MatrixXd* extra_columns) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    out << points(0, i) << ' ' << points(1, i) << ' ' << points(2, i);
    if (extra_columns) {
      for (Eigen::Index c = 0; c < extra_columns->cols(); ++c) out << ' ' << (*extra_columns)(i, c);
    }
    out << '\n';
  }
}

}  // namespace coverax

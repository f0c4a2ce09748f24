// Writes the synthetic test corpus as OBJ files into a directory.
#include "coverax/shapes.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic shape corpus"};
  std::filesystem::path out = "shapes";
  app.add_option("--out", out, "Output directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  namespace s = coverax::shapes;
  try {
    std::filesystem::create_directories(out);
    const std::pair<const char*, coverax::TriangleMesh> corpus[] = {
        {"sphere", s::icosphere(3)},
        {"ellipsoid", s::ellipsoid(coverax::Vec3(1.0, 0.3, 0.3))},
        {"tube", s::tube(0.25, 2.0)},
        {"torus", s::torus(1.0, 0.3)},
        {"box", s::box(coverax::Vec3::Zero(), coverax::Vec3(1.0, 0.6, 0.4))},
        {"l_bracket", s::l_bracket()},
        {"two_ball_union", s::two_ball_union()},
    };
    for (const auto& [name, mesh] : corpus) {
      coverax::write_obj(out / (std::string(name) + ".obj"), mesh);
      std::cout << (out / (std::string(name) + ".obj")).string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "make_shapes: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

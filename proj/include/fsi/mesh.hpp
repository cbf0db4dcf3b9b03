#pragma once

#include "fsi/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace fsi {

enum class Region { fluid, solid };
enum class EdgeTag { outer, interface };

struct TaggedEdge {
  int a;
  int b;
  EdgeTag tag;
};

/// Unit square with the centered square hole [3/8, 5/8]^2 meshed as the
/// solid; the surrounding annulus is the fluid.
struct Mesh {
  int resolution = 0;
  double h = 0.0;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<Region> regions;                // per triangle
  std::vector<TaggedEdge> boundary_edges;     // outer (Gamma_f) and interface (Gamma_s)

  double signed_area(std::size_t t) const;
  bool on_outer_boundary(int v) const;
  Index count(Region r) const;
  Index count(EdgeTag tag) const;
};

/// Structured triangulation with grid spacing 1/resolution. Each cell is cut
/// by its (i,j)-(i+1,j+1) diagonal except the two corner cells where that
/// would leave a triangle with every vertex on the outer boundary.
/// resolution must be a positive multiple of 8.
Mesh generate_annulus_mesh(int resolution);

/// vertices.csv: id,x,y ; triangles.csv: id,v0,v1,v2,region
void write_mesh_csv(const Mesh& mesh, const std::string& vertices_path,
                    const std::string& triangles_path);

}  // namespace fsi

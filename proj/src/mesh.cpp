#include "fsi/mesh.hpp"

#include "fsi/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace fsi {

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const auto& p0 = vertices[tri[0]];
  const auto& p1 = vertices[tri[1]];
  const auto& p2 = vertices[tri[2]];
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

bool Mesh::on_outer_boundary(int v) const {
  const int n = resolution;
  const int i = v % (n + 1);
  const int j = v / (n + 1);
  return i == 0 || j == 0 || i == n || j == n;
}

Index Mesh::count(Region r) const { return std::count(regions.begin(), regions.end(), r); }

Index Mesh::count(EdgeTag tag) const {
  return std::count_if(boundary_edges.begin(), boundary_edges.end(),
                       [tag](const TaggedEdge& e) { return e.tag == tag; });
}

Mesh generate_annulus_mesh(int resolution) {
  require(resolution >= 8 && resolution % 8 == 0,
          "mesh: resolution must be a positive multiple of 8 so the hole [3/8,5/8]^2 "
          "aligns with the grid (got " + std::to_string(resolution) + ")");
  const int n = resolution;
  Mesh mesh;
  mesh.resolution = n;
  mesh.h = 1.0 / n;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.push_back({double(i) / n, double(j) / n});

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  const int lo = 3 * n / 8;
  const int hi = 5 * n / 8;
  auto solid_cell = [&](int i, int j) { return i >= lo && i < hi && j >= lo && j < hi; };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      const Region r = solid_cell(i, j) ? Region::solid : Region::fluid;
      const bool flip = (i == n - 1 && j == 0) || (i == 0 && j == n - 1);
      if (flip) {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      }
      mesh.regions.push_back(r);
      mesh.regions.push_back(r);
    }
  }

  for (int k = 0; k < n; ++k) {
    mesh.boundary_edges.push_back({vid(k, 0), vid(k + 1, 0), EdgeTag::outer});
    mesh.boundary_edges.push_back({vid(n, k), vid(n, k + 1), EdgeTag::outer});
    mesh.boundary_edges.push_back({vid(k + 1, n), vid(k, n), EdgeTag::outer});
    mesh.boundary_edges.push_back({vid(0, k + 1), vid(0, k), EdgeTag::outer});
  }
  for (int k = lo; k < hi; ++k) {
    mesh.boundary_edges.push_back({vid(k, lo), vid(k + 1, lo), EdgeTag::interface});
    mesh.boundary_edges.push_back({vid(hi, k), vid(hi, k + 1), EdgeTag::interface});
    mesh.boundary_edges.push_back({vid(k + 1, hi), vid(k, hi), EdgeTag::interface});
    mesh.boundary_edges.push_back({vid(lo, k + 1), vid(lo, k), EdgeTag::interface});
  }
  return mesh;
}

void write_mesh_csv(const Mesh& mesh, const std::string& vertices_path,
                    const std::string& triangles_path) {
  std::ofstream vf(vertices_path);
  if (!vf) throw InvalidArgument("cannot open " + vertices_path + " for writing");
  vf << "id,x,y\n";
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    vf << v << ',' << format_double(mesh.vertices[v][0]) << ',' << format_double(mesh.vertices[v][1])
       << '\n';
  std::ofstream tf(triangles_path);
  if (!tf) throw InvalidArgument("cannot open " + triangles_path + " for writing");
  tf << "id,v0,v1,v2,region\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    tf << t << ',' << tri[0] << ',' << tri[1] << ',' << tri[2] << ','
       << (mesh.regions[t] == Region::solid ? "solid" : "fluid") << '\n';
  }
}

}  // namespace fsi

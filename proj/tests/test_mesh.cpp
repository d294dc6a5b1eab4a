#include <doctest.h>

#include <cstring>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "impedukt/mesh_gen.hpp"
#include "impedukt/mesh_io.hpp"

using namespace impedukt;

namespace {

double facet_area_sum(const Mesh& m, FacetTag tag) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.facets.size(); ++i)
    if (m.facets[i].tag == tag) s += m.facet_area(i);
  return s;
}

std::size_t duplicate_node_count(const Mesh& m) {
  std::unordered_map<std::string, int> seen;
  std::size_t dups = 0;
  for (const Vec3& p : m.nodes) {
    char key[24];
    std::memcpy(key, &p.x, 8);
    std::memcpy(key + 8, &p.y, 8);
    std::memcpy(key + 16, &p.z, 8);
    if (++seen[std::string(key, 24)] > 1) ++dups;
  }
  return dups;
}

}  // namespace

TEST_CASE("duct mesh volume, tags and centerline nodes") {
  DuctSpec spec{circular_section(0.01), 0.1, 0.005, Termination::ClosedRigid};
  const Mesh m = generate_duct_mesh(spec);
  m.validate();

  const double analytic = std::numbers::pi * 1e-4 * 0.1;
  CHECK(std::abs(m.total_volume() - analytic) / analytic < 0.05);

  // entrance facets are planar at z = 0
  double zmax = 0.0;
  for (const Facet& f : m.facets)
    if (f.tag == FacetTag::Source)
      for (int k : f.n) zmax = std::max(zmax, std::abs(m.nodes[k].z));
  CHECK(zmax == 0.0);
  CHECK(facet_area_sum(m, FacetTag::Rigid) > 0.0);

  // at moderate resolution the polygonal section covers the circle area to 2%
  const Mesh fine =
      generate_duct_mesh({circular_section(0.01), 0.1, 0.0025, Termination::ClosedRigid});
  CHECK(std::abs(facet_area_sum(fine, FacetTag::Source) - std::numbers::pi * 1e-4) /
            (std::numbers::pi * 1e-4) <
        0.02);
  const double lateral = 2.0 * std::numbers::pi * 0.01 * 0.1;
  CHECK(std::abs(facet_area_sum(fine, FacetTag::WallZ) - lateral) / lateral < 0.02);

  // exact centerline nodes at every station
  const int nz = static_cast<int>(std::llround(0.1 / 0.005));
  for (int k = 0; k <= nz; ++k)
    CHECK(m.node_at({0.0, 0.0, k * 0.1 / nz}, 1e-12) >= 0);
}

TEST_CASE("duct mesh errors") {
  CHECK_THROWS_AS(generate_duct_mesh({circular_section(0.01), 0.0, 0.005}), DomainError);
  // h too coarse for the section
  CHECK_THROWS_AS(generate_duct_mesh({circular_section(0.01), 0.1, 0.02}), MeshError);
}

TEST_CASE("duct length warning") {
  std::vector<std::string> warnings;
  DuctSpec spec{circular_section(0.04), 0.1, 0.01, Termination::ClosedRigid};
  generate_duct_mesh(spec, &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("elliptical duct mesh is valid and volume-accurate") {
  const auto sec = make_elliptical_section(std::numbers::pi * 1e-4, 0.8);
  DuctSpec spec{sec, 0.1, 0.002, Termination::ClosedRigid};
  const Mesh m = generate_duct_mesh(spec);
  m.validate();
  const double analytic = sec.area() * 0.1;
  CHECK(std::abs(m.total_volume() - analytic) / analytic < 0.05);
}

TEST_CASE("radiation domain topology and volumes") {
  DuctSpec spec{circular_section(0.01), 0.1, 0.005, Termination::OpenFlanged};
  const std::array<double, 3> box{0.1, 0.1, 0.1};
  const Mesh m = generate_radiation_domain(spec, box, 0.03, 0.012, 0.015);
  m.validate();
  CHECK(duplicate_node_count(m) == 0);

  const double duct_vol = std::numbers::pi * 1e-4 * 0.1;
  const double box_vol = 0.1 * 0.1 * 0.1;
  const double shell_vol = 0.16 * 0.16 * 0.13 - box_vol;
  const double analytic = duct_vol + box_vol + shell_vol;
  CHECK(std::abs(m.total_volume() - analytic) / analytic < 0.05);

  // PML region matches the shell volume, interior the rest
  CHECK(std::abs(m.region_volume(Region::Pml) - shell_vol) / shell_vol < 0.05);
  const double interior = duct_vol + box_vol;
  CHECK(std::abs(m.region_volume(Region::Interior) - interior) / interior < 0.05);

  // tags present: source, duct wall, flange, outer truncation
  CHECK(facet_area_sum(m, FacetTag::Source) > 0.0);
  CHECK(facet_area_sum(m, FacetTag::WallZ) > 0.0);
  CHECK(facet_area_sum(m, FacetTag::Rigid) > 0.0);
  CHECK(facet_area_sum(m, FacetTag::Outer) > 0.0);

  // centerline nodes: exact duct stations, graded layers through the box
  CHECK(m.node_at({0.0, 0.0, -0.05}, 1e-9) >= 0);
  CHECK(m.node_at({0.0, 0.0, 0.05}, 0.012) >= 0);
}

TEST_CASE("radiation domain errors") {
  DuctSpec spec{circular_section(0.01), 0.1, 0.005, Termination::OpenFlanged};
  CHECK_THROWS_AS(generate_radiation_domain(spec, {0.1, 0.1, 0.1}, 0.0, 0.01, 0.01), DomainError);
  DuctSpec closed = spec;
  closed.termination = Termination::ClosedRigid;
  CHECK_THROWS_AS(generate_radiation_domain(closed, {0.1, 0.1, 0.1}, 0.03, 0.01, 0.01),
                  DomainError);
  DuctSpec fat = spec;
  fat.section = circular_section(0.06);
  fat.length = 0.2;
  CHECK_THROWS_AS(generate_radiation_domain(fat, {0.1, 0.1, 0.1}, 0.03, 0.01, 0.01), MeshError);
}

TEST_CASE("constant-area tract equals the equivalent cylinder") {
  const double r = 0.01;
  AreaFunction af;
  af.stations = {{0.0, std::numbers::pi * r * r, 0.0}, {0.1, std::numbers::pi * r * r, 0.0}};
  const Mesh tract = generate_tract_mesh(af, 0.005);
  const Mesh duct = generate_duct_mesh({circular_section(r), 0.1, 0.005, Termination::ClosedRigid});
  tract.validate();

  REQUIRE(tract.nodes.size() == duct.nodes.size());
  REQUIRE(tract.tets.size() == duct.tets.size());
  double max_diff = 0.0;
  for (std::size_t i = 0; i < tract.nodes.size(); ++i)
    max_diff = std::max(max_diff, (tract.nodes[i] - duct.nodes[i]).norm());
  CHECK(max_diff < 1e-12);
  for (std::size_t i = 0; i < tract.tets.size(); ++i)
    CHECK(tract.tets[i].n == duct.tets[i].n);
}

TEST_CASE("linear area doubling gives 1.5x the entrance area mid-way") {
  const double a0 = std::numbers::pi * 1e-4;
  AreaFunction af;
  af.stations = {{0.0, a0, 0.0}, {0.1, 2.0 * a0, 0.0}};
  const double h = 0.004;
  const Mesh m = generate_tract_mesh(af, h);
  m.validate();

  const double src = facet_area_sum(m, FacetTag::Source);
  // average the two slabs straddling z = 0.05 (area is linear in z there)
  const int nz = static_cast<int>(std::llround(0.1 / h));
  const double dz = 0.1 / nz;
  const double zmid = 0.05;
  double vol = 0.0;
  for (std::size_t i = 0; i < m.tets.size(); ++i) {
    const double zc = m.tet_centroid(i).z;
    if (zc > zmid - dz && zc < zmid + dz) vol += m.tet_volume(i);
  }
  const double measured = vol / (2.0 * dz);
  CHECK(std::abs(measured / (1.5 * src) - 1.0) < 0.02);
}

TEST_CASE("tract errors") {
  AreaFunction single;
  single.stations = {{0.0, 1e-4, 0.0}};
  CHECK_THROWS_AS(generate_tract_mesh(single, 0.002), DomainError);

  AreaFunction backwards;
  backwards.stations = {{0.0, 1e-4, 0.0}, {-0.1, 1e-4, 0.0}};
  CHECK_THROWS_AS(generate_tract_mesh(backwards, 0.002), ParseError);

  AreaFunction fine;
  fine.stations = {{0.0, 1e-4, 0.0}, {0.1, 1e-4, 0.0}};
  CHECK_THROWS_AS(generate_tract_mesh(fine, 0.02), MeshError);
}

TEST_CASE("mesh text round-trip is lossless") {
  DuctSpec spec{make_elliptical_section(2.1e-4, 0.55), 0.07, 0.0031, Termination::ClosedRigid};
  const Mesh m = generate_duct_mesh(spec);
  const std::string text = serialize_mesh(m);
  std::istringstream in(text);
  const Mesh back = parse_mesh(in);
  REQUIRE(back.nodes.size() == m.nodes.size());
  REQUIRE(back.tets.size() == m.tets.size());
  REQUIRE(back.facets.size() == m.facets.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    CHECK(back.nodes[i].x == m.nodes[i].x);
    CHECK(back.nodes[i].y == m.nodes[i].y);
    CHECK(back.nodes[i].z == m.nodes[i].z);
  }
  CHECK(serialize_mesh(back) == text);
}

TEST_CASE("mesh parse errors carry line numbers") {
  SUBCASE("empty file") {
    std::istringstream in("");
    CHECK_THROWS_AS(parse_mesh(in), ParseError);
  }
  SUBCASE("facet references a missing node") {
    std::istringstream in(
        "meshv1 4 1 1\n"
        "n 0 0 0\nn 1 0 0\nn 0 1 0\nn 0 0 1\n"
        "t 0 1 2 3 interior\n"
        "f 0 1 9 rigid\n");
    try {
      parse_mesh(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line_number == 7);
    }
  }
  SUBCASE("bad tag") {
    std::istringstream in(
        "meshv1 4 1 1\n"
        "n 0 0 0\nn 1 0 0\nn 0 1 0\nn 0 0 1\n"
        "t 0 1 2 3 interior\n"
        "f 0 1 2 slippery\n");
    CHECK_THROWS_AS(parse_mesh(in), ParseError);
  }
  SUBCASE("count mismatch") {
    std::istringstream in("meshv1 2 0 0\nn 0 0 0\n");
    CHECK_THROWS_AS(parse_mesh(in), ParseError);
  }
}

TEST_CASE("area function csv") {
  std::istringstream in(
      "z_m,area_m2,eccentricity\n"
      "0.0,2.5e-4,0.0\n"
      "0.08,1.1e-4,0.6\n");
  const AreaFunction af = parse_area_function(in);
  REQUIRE(af.stations.size() == 2);
  CHECK(af.stations[1].ecc == doctest::Approx(0.6));

  std::istringstream bad("z_m,area_m2,eccentricity\n0.0;2.5e-4;0\n");
  CHECK_THROWS_AS(parse_area_function(bad), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_area_function(empty), ParseError);
}

TEST_CASE("validate rejects broken meshes") {
  Mesh m;
  m.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.tets = {{{0, 1, 2, 3}, Region::Interior}};
  m.facets = {{{0, 1, 2}, FacetTag::Rigid, -1.0}};
  CHECK_NOTHROW(m.validate());

  Mesh flipped = m;
  std::swap(flipped.tets[0].n[0], flipped.tets[0].n[1]);
  CHECK_THROWS_AS(flipped.validate(), MeshError);

  Mesh doubled = m;
  doubled.facets.push_back({{0, 2, 1}, FacetTag::Outer, -1.0});
  CHECK_THROWS_AS(doubled.validate(), MeshError);

  Mesh shared = m;
  shared.nodes.push_back({1, 1, 1});
  shared.tets.push_back({{1, 2, 3, 4}, Region::Interior});
  shared.facets = {{{1, 2, 3}, FacetTag::Rigid, -1.0}};
  CHECK_THROWS_AS(shared.validate(), MeshError);
}

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "impedukt/errors.hpp"
#include "impedukt/geometry.hpp"
#include "impedukt/mesh.hpp"

namespace impedukt {

namespace detail {

inline const char* tag_token(FacetTag t) {
  switch (t) {
    case FacetTag::Source: return "source";
    case FacetTag::WallW: return "wall_w";
    case FacetTag::WallZ: return "wall_z";
    case FacetTag::Rigid: return "rigid";
    case FacetTag::Outer: return "outer";
  }
  return "rigid";
}

inline FacetTag parse_tag(const std::string& s, long line) {
  if (s == "source") return FacetTag::Source;
  if (s == "wall_w") return FacetTag::WallW;
  if (s == "wall_z") return FacetTag::WallZ;
  if (s == "rigid") return FacetTag::Rigid;
  if (s == "outer") return FacetTag::Outer;
  throw ParseError("unknown facet tag '" + s + "'", line);
}

// %.17g guarantees exact double round-trips through text.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Line-oriented text format:
///   meshv1 <n_nodes> <n_tets> <n_facets>
///   n <x> <y> <z>
///   t <i0> <i1> <i2> <i3> <interior|pml>
///   f <i0> <i1> <i2> <tag> [<mu>]
inline std::string serialize_mesh(const Mesh& m) {
  std::string out;
  out.reserve(m.nodes.size() * 64 + m.tets.size() * 32 + m.facets.size() * 32);
  out += "meshv1 " + std::to_string(m.nodes.size()) + " " + std::to_string(m.tets.size()) + " " +
         std::to_string(m.facets.size()) + "\n";
  for (const Vec3& p : m.nodes)
    out += "n " + detail::fmt_double(p.x) + " " + detail::fmt_double(p.y) + " " +
           detail::fmt_double(p.z) + "\n";
  for (const Tet& t : m.tets) {
    out += "t";
    for (int k : t.n) out += " " + std::to_string(k);
    out += t.region == Region::Pml ? " pml\n" : " interior\n";
  }
  for (const Facet& f : m.facets) {
    out += "f";
    for (int k : f.n) out += " " + std::to_string(k);
    out += " ";
    out += detail::tag_token(f.tag);
    if (f.mu >= 0.0) out += " " + detail::fmt_double(f.mu);
    out += "\n";
  }
  return out;
}

inline void write_mesh(const Mesh& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  const std::string s = serialize_mesh(m);
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw ParseError("failed writing mesh to '" + path + "'");
}

inline Mesh parse_mesh(std::istream& in) {
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty mesh file", 1);
  ++lineno;
  std::istringstream hs(line);
  std::string magic;
  std::size_t nn = 0, nt = 0, nf = 0;
  if (!(hs >> magic >> nn >> nt >> nf) || magic != "meshv1")
    throw ParseError("expected header 'meshv1 <nodes> <tets> <facets>'", lineno);

  Mesh m;
  m.nodes.reserve(nn);
  m.tets.reserve(nt);
  m.facets.reserve(nf);

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "n") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw ParseError("malformed node line", lineno);
      m.nodes.push_back(p);
    } else if (kind == "t") {
      Tet t;
      std::string reg;
      if (!(ls >> t.n[0] >> t.n[1] >> t.n[2] >> t.n[3] >> reg))
        throw ParseError("malformed tet line", lineno);
      if (reg == "interior") t.region = Region::Interior;
      else if (reg == "pml") t.region = Region::Pml;
      else throw ParseError("unknown tet region '" + reg + "'", lineno);
      for (int k : t.n)
        if (k < 0 || k >= static_cast<int>(m.nodes.size()))
          throw ParseError("tet references a missing node", lineno);
      m.tets.push_back(t);
    } else if (kind == "f") {
      Facet f;
      std::string tag;
      if (!(ls >> f.n[0] >> f.n[1] >> f.n[2] >> tag)) throw ParseError("malformed facet line", lineno);
      f.tag = detail::parse_tag(tag, lineno);
      double mu;
      if (ls >> mu) {
        if (mu < 0.0) throw ParseError("facet admittance must be non-negative", lineno);
        f.mu = mu;
      }
      for (int k : f.n)
        if (k < 0 || k >= static_cast<int>(m.nodes.size()))
          throw ParseError("facet references a missing node", lineno);
      m.facets.push_back(f);
    } else {
      throw ParseError("unknown record '" + kind + "'", lineno);
    }
  }

  if (m.nodes.size() != nn || m.tets.size() != nt || m.facets.size() != nf)
    throw ParseError("mesh record counts do not match the header", lineno);
  return m;
}

inline Mesh read_mesh(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open mesh file '" + path + "'");
  return parse_mesh(f);
}

/// Area function CSV with header z_m,area_m2,eccentricity.
inline AreaFunction parse_area_function(std::istream& in) {
  AreaFunction af;
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty area function file", 1);
  ++lineno;
  if (line.rfind("z_m,area_m2,eccentricity", 0) != 0)
    throw ParseError("expected header 'z_m,area_m2,eccentricity'", lineno);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    AreaFunction::Station st;
    char c1 = 0, c2 = 0;
    std::istringstream ls(line);
    if (!(ls >> st.z >> c1 >> st.area >> c2 >> st.ecc) || c1 != ',' || c2 != ',')
      throw ParseError("malformed area function row", lineno);
    af.stations.push_back(st);
  }
  af.validate();
  return af;
}

inline AreaFunction read_area_function(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open area function file '" + path + "'");
  return parse_area_function(f);
}

}  // namespace impedukt

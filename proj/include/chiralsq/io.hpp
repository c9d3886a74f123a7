#pragma once

// JSON (de)serialization for the core value types.
//
// Documents are parsed with nlohmann::json; writing goes through a small
// canonical emitter so that identical values always produce identical
// bytes: fixed key order, fixed spacing, floats printed with %.17g
// (17 significant digits round-trip a double exactly).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chiralsq/types.hpp"

namespace chiralsq::io {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_complex_pair(cplx z) {
  return "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]";
}

namespace detail {

inline nlohmann::json parse_document(const std::string &text, const std::string &what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw parse_error(what + ": " + e.what());
  }
}

inline const nlohmann::json &field(const nlohmann::json &j, const char *key,
                                   const std::string &what) {
  auto it = j.find(key);
  if (it == j.end()) throw parse_error(what + ": missing field '" + key + "'");
  return *it;
}

inline cplx read_complex(const nlohmann::json &j, const std::string &where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw parse_error(where + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Matrix read_matrix(const nlohmann::json &j, const std::string &what) {
  const int n = field(j, "dim", what).get<int>();
  if (n < 1) throw parse_error(what + ": dim must be >= 1");
  const auto &rows = field(j, "entries", what);
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw parse_error(what + ": entries must hold " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n)
      throw parse_error(what + ": row " + std::to_string(r) + " must hold " +
                        std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      m(r, c) = read_complex(rows[r][c], what + ": entry (" + std::to_string(r) + "," +
                                             std::to_string(c) + ")");
  }
  return m;
}

inline void write_matrix_body(std::ostream &os, const Matrix &m) {
  const int n = static_cast<int>(m.rows());
  os << "\"dim\": " << n << ", \"entries\": [";
  for (int r = 0; r < n; ++r) {
    os << (r ? ", " : "") << "[";
    for (int c = 0; c < n; ++c) os << (c ? ", " : "") << format_complex_pair(m(r, c));
    os << "]";
  }
  os << "]";
}

}  // namespace detail

// ---- matrices ----

inline std::string save_matrix(const Matrix &m) {
  std::ostringstream os;
  os << "{";
  detail::write_matrix_body(os, m);
  os << "}\n";
  return os.str();
}

inline Matrix load_matrix(const std::string &text) {
  return detail::read_matrix(detail::parse_document(text, "matrix"), "matrix");
}

inline std::string save_hamiltonian(const Hamiltonian &h) { return save_matrix(h.mat); }

inline Hamiltonian load_hamiltonian(const std::string &text) {
  return make_hamiltonian(load_matrix(text));
}

// Symmetry documents carry the drain index next to the dense matrix.
inline std::string save_sigma(const SymmetryMatrix &s) {
  std::ostringstream os;
  os << "{\"drain\": " << s.drain << ", ";
  detail::write_matrix_body(os, s.mat);
  os << "}\n";
  return os.str();
}

inline SymmetryMatrix load_sigma(const std::string &text) {
  const auto j = detail::parse_document(text, "sigma");
  SymmetryMatrix s{detail::read_matrix(j, "sigma"), detail::field(j, "drain", "sigma").get<int>()};
  if (s.drain < 0 || s.drain >= s.dim()) throw parse_error("sigma: drain index out of range");
  return s;
}

// ---- lattice ----

inline std::string save_lattice(const LatticeSpec &l) {
  std::ostringstream os;
  os << "{\"sites\": [";
  for (std::size_t i = 0; i < l.sites.size(); ++i) {
    os << (i ? ", " : "") << "[";
    for (std::size_t d = 0; d < l.sites[i].size(); ++d)
      os << (d ? ", " : "") << l.sites[i][d];
    os << "]";
  }
  os << "], \"drain\": " << l.drain << ", \"edges\": [";
  for (std::size_t i = 0; i < l.edges.size(); ++i)
    os << (i ? ", " : "") << "[" << l.edges[i].first << ", " << l.edges[i].second << "]";
  os << "]}\n";
  return os.str();
}

inline LatticeSpec load_lattice(const std::string &text) {
  const auto j = detail::parse_document(text, "lattice");
  LatticeSpec l;
  for (const auto &s : detail::field(j, "sites", "lattice")) {
    std::vector<int> coords;
    for (const auto &c : s) {
      if (!c.is_number_integer()) throw parse_error("lattice: coordinates must be integers");
      coords.push_back(c.get<int>());
    }
    l.sites.push_back(std::move(coords));
  }
  l.drain = detail::field(j, "drain", "lattice").get<int>();
  for (const auto &e : detail::field(j, "edges", "lattice")) {
    if (!e.is_array() || e.size() != 2) throw parse_error("lattice: edge must be [i, j]");
    l.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  l.validate();
  return l;
}

// ---- squeeze parameters ----

inline std::string save_squeeze(const SqueezeParams &s) {
  std::ostringstream os;
  os << "{\"r\": " << format_double(s.r) << ", \"phi\": " << format_double(s.phi)
     << ", \"gamma\": " << format_double(s.gamma) << "}\n";
  return os.str();
}

inline SqueezeParams load_squeeze(const std::string &text) {
  const auto j = detail::parse_document(text, "squeeze");
  SqueezeParams s{detail::field(j, "r", "squeeze").get<double>(),
                  detail::field(j, "phi", "squeeze").get<double>(),
                  detail::field(j, "gamma", "squeeze").get<double>()};
  s.validate();
  return s;
}

// ---- moments ----

inline std::string save_moments(const GaussianMoments &g) {
  std::ostringstream os;
  os << "{\"normal\": {";
  detail::write_matrix_body(os, g.normal);
  os << "}, \"anomalous\": {";
  detail::write_matrix_body(os, g.anomalous);
  os << "}}\n";
  return os.str();
}

inline GaussianMoments load_moments(const std::string &text) {
  const auto j = detail::parse_document(text, "moments");
  GaussianMoments g{detail::read_matrix(detail::field(j, "normal", "moments"), "moments.normal"),
                    detail::read_matrix(detail::field(j, "anomalous", "moments"),
                                        "moments.anomalous")};
  g.validate();
  return g;
}

// ---- files ----

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
}

}  // namespace chiralsq::io

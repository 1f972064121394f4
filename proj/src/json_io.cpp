#include "chandiv/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "chandiv/errors.hpp"

namespace chandiv {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double as_number(const json& j, const char* what) {
  if (!j.is_number()) throw InvalidArgument(std::string(what) + ": expected a number");
  return j.get<double>();
}

cplx as_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw InvalidArgument(std::string(what) + ": expected [re, im]");
  return {as_number(j[0], what), as_number(j[1], what)};
}

void check_rows(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw InvalidArgument(std::string(what) + ": expected a non-empty array of rows");
  for (const auto& row : j)
    if (!row.is_array() || row.size() != j[0].size())
      throw InvalidArgument(std::string(what) + ": rows have different lengths");
}

}  // namespace

json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

json cmatrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(json::array({num(m(i, k).real()), num(m(i, k).imag())}));
    rows.push_back(row);
  }
  return rows;
}

json rmatrix_to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(num(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

CMatrix cmatrix_from_json(const json& j, const char* what) {
  check_rows(j, what);
  CMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t k = 0; k < j[0].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = as_complex(j[i][k], what);
  return m;
}

RMatrix rmatrix_from_json(const json& j, const char* what) {
  check_rows(j, what);
  RMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t k = 0; k < j[0].size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = as_number(j[i][k], what);
  return m;
}

json channel_to_json(const ChannelRep& c, Representation r) {
  json out{{"dim", c.dim()}, {"representation", std::string(to_string(r))}};
  switch (r) {
    case Representation::Ptm:
      out["data"] = rmatrix_to_json(c.ptm());
      break;
    case Representation::Choi:
      out["data"] = cmatrix_to_json(c.choi());
      break;
    case Representation::Superop:
      out["data"] = cmatrix_to_json(c.superop());
      break;
    case Representation::Kraus: {
      json ks = json::array();
      for (const auto& k : c.kraus()) ks.push_back(cmatrix_to_json(k));
      out["data"] = ks;
      break;
    }
  }
  return out;
}

json channel_to_json(const ChannelRep& c) { return channel_to_json(c, c.representation()); }

ChannelRep channel_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("channel spec must be a JSON object");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw InvalidArgument("\"name\" must be a string");
    std::map<std::string, double> params;
    if (j.contains("params")) {
      if (!j.at("params").is_object()) throw InvalidArgument("\"params\" must be an object");
      for (const auto& [k, v] : j.at("params").items()) params[k] = as_number(v, k.c_str());
    }
    return make_named(j.at("name").get<std::string>(), params);
  }
  const json& dim_j = field(j, "dim");
  if (!dim_j.is_number_integer()) throw InvalidArgument("\"dim\" must be an integer");
  const int dim = dim_j.get<int>();
  if (dim < 1 || dim > kMaxDim) throw DimensionError("\"dim\" out of range");
  const json& rep_j = field(j, "representation");
  if (!rep_j.is_string()) throw InvalidArgument("\"representation\" must be a string");
  const Representation rep = representation_from_string(rep_j.get<std::string>());
  const json& data = field(j, "data");

  ChannelRep c = [&] {
    switch (rep) {
      case Representation::Ptm:
        return ChannelRep::from_ptm(rmatrix_from_json(data, "ptm"));
      case Representation::Choi:
        return ChannelRep::from_choi(cmatrix_from_json(data, "choi"));
      case Representation::Superop:
        return ChannelRep::from_superop(cmatrix_from_json(data, "superop"));
      case Representation::Kraus: {
        if (!data.is_array() || data.empty()) throw InvalidArgument("kraus: expected a non-empty list of matrices");
        std::vector<CMatrix> ks;
        for (const auto& k : data) ks.push_back(cmatrix_from_json(k, "kraus"));
        return ChannelRep::from_kraus(ks);
      }
    }
    throw InvalidArgument("unknown representation");
  }();
  if (c.dim() != dim) throw DimensionError("\"dim\" does not match the data");
  return c;
}

json generator_to_json(const LindbladGenerator& g) {
  return {{"dim", g.dim()},
          {"hamiltonian", cmatrix_to_json(g.hamiltonian())},
          {"kossakowski", cmatrix_to_json(g.kossakowski())},
          {"basis", "gellmann"}};
}

LindbladGenerator generator_from_json(const json& j, const Tolerances& tol) {
  if (!j.is_object()) throw InvalidArgument("generator spec must be a JSON object");
  if (j.contains("basis") && j.at("basis") != "gellmann") throw InvalidArgument("only the \"gellmann\" basis is supported");
  const json& dim_j = field(j, "dim");
  if (!dim_j.is_number_integer()) throw InvalidArgument("\"dim\" must be an integer");
  const int dim = dim_j.get<int>();
  LindbladGenerator g(cmatrix_from_json(field(j, "hamiltonian"), "hamiltonian"),
                      cmatrix_from_json(field(j, "kossakowski"), "kossakowski"), tol);
  if (g.dim() != dim) throw DimensionError("\"dim\" does not match the data");
  return g;
}

}  // namespace chandiv

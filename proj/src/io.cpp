#include "maj/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "maj/errors.hpp"

namespace maj::io {

namespace {

double num(const json& j, const char* what) {
  if (!j.is_number())
    throw InputError(std::string(what) + ": expected a number");
  return j.get<double>();
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw InputError(std::string("missing field \"") + key + "\"");
  return *it;
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return j;
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  // Trim digits while the value still reads back exactly.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
    if (std::strtod(shorter, nullptr) == x) return shorter;
  }
  return buf;
}

cxd entry_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2)
    return {num(j[0], "entry"), num(j[1], "entry")};
  throw InputError("matrix entry must be a number or [re, im]");
}

json entry_to_json(const cxd& z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw InputError("matrix must be a nonempty array of rows");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError("matrix rows must all have the same length");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(entry_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

StepFunction scale_from_json(const json& j) {
  const json& arr = j.is_object() ? field(j, "scale") : j;
  if (!arr.is_array()) throw InputError("scale must be an array of [value, width]");
  std::vector<Piece> ps;
  ps.reserve(arr.size());
  for (const json& e : arr) {
    if (!e.is_array() || e.size() != 2)
      throw InputError("scale entries must be [value, width]");
    ps.push_back({num(e[0], "scale value"), num(e[1], "scale width")});
  }
  return canonical(std::move(ps));
}

json scale_to_json(const StepFunction& s) {
  json arr = json::array();
  for (const Piece& p : s.pieces) arr.push_back(json::array({p.value, p.width}));
  return json{{"scale", std::move(arr)}};
}

WeightedVector weighted_from_json(const json& j) {
  const json& vs = field(j, "values");
  if (!vs.is_array()) throw InputError("\"values\" must be an array");
  std::vector<double> values, masses;
  for (const json& v : vs) values.push_back(num(v, "values"));
  if (j.contains("masses")) {
    const json& ms = j["masses"];
    if (!ms.is_array() || ms.size() != vs.size())
      throw InputError("\"masses\" must match \"values\" in length");
    for (const json& m : ms) masses.push_back(num(m, "masses"));
  } else {
    masses.assign(values.size(), 1.0);
  }
  bool tail = j.value("infinite_tail", false);
  return weighted(std::move(values), std::move(masses), tail);
}

json weighted_to_json(const WeightedVector& w) {
  json out{{"values", w.values}, {"masses", w.masses}};
  if (w.infinite_tail) out["infinite_tail"] = true;
  return out;
}

StochasticMap map_from_json(const json& j) {
  Eigen::MatrixXcd mc = matrix_from_json(field(j, "matrix"));
  if (mc.imag().cwiseAbs().maxCoeff() != 0.0)
    throw InputError("stochastic map entries must be real");
  StochasticMap m;
  m.matrix = mc.real();
  const json& sm = field(j, "source_masses");
  const json& tm = field(j, "target_masses");
  if (!sm.is_array() || static_cast<Eigen::Index>(sm.size()) != m.matrix.cols())
    throw InputError("\"source_masses\" must match the matrix column count");
  if (!tm.is_array() || static_cast<Eigen::Index>(tm.size()) != m.matrix.rows())
    throw InputError("\"target_masses\" must match the matrix row count");
  m.source_masses.resize(m.matrix.cols());
  m.target_masses.resize(m.matrix.rows());
  for (Eigen::Index i = 0; i < m.matrix.cols(); ++i)
    m.source_masses[i] = num(sm[static_cast<std::size_t>(i)], "source_masses");
  for (Eigen::Index i = 0; i < m.matrix.rows(); ++i)
    m.target_masses[i] = num(tm[static_cast<std::size_t>(i)], "target_masses");
  return m;
}

json map_to_json(const StochasticMap& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.matrix.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.matrix.cols(); ++c)
      row.push_back(m.matrix(r, c));
    rows.push_back(std::move(row));
  }
  std::vector<double> sm(m.source_masses.data(),
                         m.source_masses.data() + m.source_masses.size());
  std::vector<double> tm(m.target_masses.data(),
                         m.target_masses.data() + m.target_masses.size());
  return json{{"matrix", std::move(rows)},
              {"source_masses", std::move(sm)},
              {"target_masses", std::move(tm)}};
}

FactorModel factor_from_json(const json& j) {
  FactorModel f;
  std::string kind = field(j, "kind").get<std::string>();
  if (kind == "I") {
    f.kind = FactorKind::TypeI;
    f.dim = field(j, "n").get<int>();
    if (f.dim < 1) throw InputError("factor dimension must be positive");
  } else if (kind == "II1") {
    f.kind = FactorKind::TypeII1;
    f.dim = 0;
  } else if (kind == "IIinf") {
    f.kind = FactorKind::TypeIIinf;
    f.dim = 0;
  } else {
    throw InputError("factor kind must be \"I\", \"II1\", or \"IIinf\"");
  }
  f.trace_unit = j.value("trace_unit", 1.0);
  if (!(f.trace_unit > 0.0)) throw InputError("trace_unit must be positive");
  return f;
}

json factor_to_json(const FactorModel& f) {
  json out;
  switch (f.kind) {
    case FactorKind::TypeI:
      out = json{{"kind", "I"}, {"n", f.dim}};
      break;
    case FactorKind::TypeII1:
      out = json{{"kind", "II1"}};
      break;
    case FactorKind::TypeIIinf:
      out = json{{"kind", "IIinf"}};
      break;
  }
  if (f.trace_unit != 1.0) out["trace_unit"] = f.trace_unit;
  return out;
}

Density density_from_json(const json& j) {
  double tu = 1.0;
  FactorModel f{FactorKind::TypeI, 0, 1.0};
  bool have_factor = j.contains("factor");
  if (have_factor) f = factor_from_json(j["factor"]);
  tu = f.trace_unit;
  if (j.contains("matrix")) {
    Eigen::MatrixXcd m = matrix_from_json(j["matrix"]);
    if (m.rows() != m.cols()) throw InputError("density matrix must be square");
    if (have_factor) {
      if (f.kind != FactorKind::TypeI)
        throw InputError("a matrix-backed density needs a type I factor");
      if (f.dim != m.rows())
        throw InputError("factor dimension does not match the matrix");
    }
    return density_from_matrix(m, tu);
  }
  if (j.contains("scale")) {
    if (!have_factor)
      throw InputError("a scale-backed density needs a \"factor\"");
    return density_from_scale(scale_from_json(j["scale"]), f.kind, tu);
  }
  throw InputError("density needs a \"matrix\" or a \"scale\"");
}

json density_to_json(const Density& d) {
  json out;
  if (d.matrix_backed)
    out["matrix"] = matrix_to_json(d.matrix);
  else
    out["scale"] = scale_to_json(d.scale_fn)["scale"];
  out["factor"] = factor_to_json(d.factor);
  return out;
}

BipartitePureState state_from_json(const json& j) {
  const json& dims = field(j, "dims");
  if (!dims.is_array() || dims.size() != 2)
    throw InputError("\"dims\" must be [dimA, dimB]");
  int da = dims[0].get<int>(), db = dims[1].get<int>();
  if (j.contains("vector")) {
    const json& ve = j["vector"];
    if (!ve.is_array() ||
        static_cast<int>(ve.size()) != da * db)
      throw InputError("\"vector\" must have dimA*dimB entries");
    Eigen::VectorXcd v(da * db);
    for (std::size_t i = 0; i < ve.size(); ++i)
      v[static_cast<Eigen::Index>(i)] = entry_from_json(ve[i]);
    return state_from_vector(v, da, db);
  }
  if (j.contains("schmidt")) {
    const json& sc = j["schmidt"];
    if (!sc.is_array()) throw InputError("\"schmidt\" must be an array");
    std::vector<std::tuple<double, int, int>> terms;
    for (const json& t : sc) {
      if (!t.is_array() || t.size() != 3)
        throw InputError("schmidt terms must be [coeff, i, j]");
      terms.emplace_back(num(t[0], "schmidt coeff"), t[1].get<int>(),
                         t[2].get<int>());
    }
    return state_from_schmidt(terms, da, db);
  }
  throw InputError("state needs a \"vector\" or \"schmidt\" field");
}

json state_to_json(const BipartitePureState& psi) {
  Eigen::VectorXcd v = state_vector(psi);
  json ve = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    ve.push_back(entry_to_json(v[i]));
  return json{{"dims", json::array({psi.dim_a(), psi.dim_b()})},
              {"vector", std::move(ve)}};
}

LoccProtocol protocol_from_json(const json& j) {
  const json& rounds = field(j, "rounds");
  if (!rounds.is_array()) throw InputError("\"rounds\" must be an array");
  LoccProtocol p;
  for (const json& jr : rounds) {
    ProtocolRound round;
    std::string party = field(jr, "party").get<std::string>();
    if (party != "A" && party != "B")
      throw InputError("round party must be \"A\" or \"B\"");
    round.party = party[0];
    const json& cases = field(jr, "cases");
    if (!cases.is_array() || cases.empty())
      throw InputError("\"cases\" must be a nonempty array");
    for (const json& jc : cases) {
      ProtocolCase pc;
      if (jc.contains("on")) {
        std::vector<std::string> on;
        for (const json& l : jc["on"]) on.push_back(l.get<std::string>());
        pc.on = std::move(on);
      }
      const json& outs = field(jc, "outcomes");
      if (!outs.is_array() || outs.empty())
        throw InputError("\"outcomes\" must be a nonempty array");
      for (const json& jo : outs) {
        pc.instrument.labels.push_back(field(jo, "label").get<std::string>());
        pc.instrument.kraus.push_back(matrix_from_json(field(jo, "kraus")));
      }
      round.cases.push_back(std::move(pc));
    }
    p.rounds.push_back(std::move(round));
  }
  return p;
}

json protocol_to_json(const LoccProtocol& p) {
  json rounds = json::array();
  for (const ProtocolRound& round : p.rounds) {
    json cases = json::array();
    for (const ProtocolCase& pc : round.cases) {
      json outs = json::array();
      for (std::size_t k = 0; k < pc.instrument.kraus.size(); ++k)
        outs.push_back(json{{"label", pc.instrument.labels[k]},
                            {"kraus", matrix_to_json(pc.instrument.kraus[k])}});
      json jc{{"outcomes", std::move(outs)}};
      if (pc.on) jc["on"] = *pc.on;
      cases.push_back(std::move(jc));
    }
    rounds.push_back(json{{"party", std::string(1, round.party)},
                          {"cases", std::move(cases)}});
  }
  return json{{"rounds", std::move(rounds)}};
}

json channel_to_json(const KrausChannel& c) {
  json ks = json::array();
  for (const Eigen::MatrixXcd& k : c.kraus) ks.push_back(matrix_to_json(k));
  return json{{"kraus", std::move(ks)}};
}

json lorenz_to_json(const LorenzCurve& c) {
  json knots = json::array();
  for (std::size_t i = 0; i < c.knots_t.size(); ++i)
    knots.push_back(json::array({c.knots_t[i], c.knots_L[i]}));
  return json{{"knots", std::move(knots)}};
}

Payload detect(const json& j) {
  if (j.is_array()) return Payload::Scale;
  if (!j.is_object()) return Payload::Unknown;
  if (j.contains("rounds")) return Payload::Protocol;
  if (j.contains("dims")) return Payload::State;
  if (j.contains("source_masses")) return Payload::Map;
  if (j.contains("matrix") || j.contains("factor")) return Payload::DensityLike;
  if (j.contains("values")) return Payload::Weighted;
  if (j.contains("scale")) return Payload::Scale;
  return Payload::Unknown;
}

StepFunction any_scale_from_json(const json& j) {
  switch (detect(j)) {
    case Payload::Scale:
      return scale_from_json(j);
    case Payload::Weighted:
      return scale_of(weighted_from_json(j));
    case Payload::DensityLike:
      return spectral_scale(density_from_json(j));
    case Payload::State: {
      BipartitePureState psi = state_from_json(j);
      return marginal_scale_a(psi);
    }
    default:
      throw InputError("input does not describe a distribution");
  }
}

}  // namespace maj::io

#include "nullity/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nullity/model_catalog.hpp"

namespace nullity::io {

namespace {

double number(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
  return j.get<double>();
}

int integer(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

Eigen::MatrixXd square_matrix(const nlohmann::json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw InputError(std::string(what) + ": expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw InputError(std::string(what) + ": row " + std::to_string(r) + " must have " + std::to_string(n) +
                       " entries");
    for (int c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0.0";  // no negative zero in reports
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_into(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(k).dump() + ": ";
        dump_into(out, v, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(out, j[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_into(out, j[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw InputError("not a number: '" + s + "'");
  return v;
}

}  // namespace

LieMetricSpace<double> lie_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("algebra: expected a JSON object");
  if (!j.contains("dim")) throw InputError("algebra: missing \"dim\"");
  const int n = integer(j["dim"], "dim");
  if (n <= 0) throw InputError("dim must be positive");
  std::vector<BracketTerm<double>> terms;
  if (j.contains("brackets")) {
    if (!j["brackets"].is_array()) throw InputError("brackets: expected an array");
    for (const auto& b : j["brackets"]) {
      if (!b.is_object() || !b.contains("i") || !b.contains("j") || !b.contains("coeffs"))
        throw InputError("bracket entries need \"i\", \"j\" and \"coeffs\"");
      const int i = integer(b["i"], "bracket i");
      const int jj = integer(b["j"], "bracket j");
      const auto& c = b["coeffs"];
      if (!c.is_array() || static_cast<int>(c.size()) != n)
        throw InputError("coeffs must have " + std::to_string(n) + " entries");
      for (int k = 0; k < n; ++k) {
        const double v = number(c[static_cast<std::size_t>(k)], "coeffs");
        if (v != 0.0) terms.push_back({i, jj, k, v});
      }
    }
  }
  if (j.contains("metric")) return LieMetricSpace<double>(n, std::move(terms), square_matrix(j["metric"], n, "metric"));
  return LieMetricSpace<double>(n, std::move(terms));
}

Json lie_to_json(const LieMetricSpace<double>& space) {
  const int n = space.dim();
  Json brackets = Json::array();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd c = space.ad(i).col(j);
      if (c.cwiseAbs().maxCoeff() == 0.0) continue;
      Json b;
      b["i"] = i;
      b["j"] = j;
      b["coeffs"] = to_json(c);
      brackets.push_back(std::move(b));
    }
  Json out;
  out["dim"] = n;
  out["brackets"] = std::move(brackets);
  out["metric"] = to_json(space.metric());
  return out;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("A")) throw InputError("matrix document: missing \"A\"");
  const auto& a = j["A"];
  if (!a.is_array() || a.empty()) throw InputError("A: expected a nonempty array of rows");
  const int m = j.contains("m") ? integer(j["m"], "m") : static_cast<int>(a.size());
  return square_matrix(a, m, "A");
}

Json matrix_doc(const Eigen::MatrixXd& a) {
  Json out;
  out["m"] = a.rows();
  out["A"] = to_json(a);
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const NullityResult<double>& r) {
  Json out;
  out["kappa"] = r.kappa;
  out["index"] = r.index;
  Json basis = Json::array();
  for (Eigen::Index c = 0; c < r.basis.cols(); ++c) basis.push_back(to_json(Eigen::VectorXd(r.basis.col(c))));
  out["basis"] = std::move(basis);
  out["residual"] = r.residual;
  return out;
}

std::string dump(const Json& j) {
  std::string out;
  dump_into(out, j, 0);
  out += "\n";
  return out;
}

std::vector<double> parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw InputError("range must be a:b:n, got '" + s + "'");
  const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
  const double n = parse_double(parts[2]);
  if (n < 1 || n != std::floor(n)) throw InputError("range sample count must be a positive integer");
  return linspace(lo, hi, static_cast<int>(n));
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_double(p));
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& s) {
  const auto rows = split(s, ';');
  const auto n = rows.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto vals = parse_list(rows[r]);
    if (vals.size() != n) throw InputError("matrix must be square: row " + std::to_string(r) + " has " +
                                           std::to_string(vals.size()) + " entries");
    for (std::size_t c = 0; c < n; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = vals[c];
  }
  return m;
}

LieMetricSpace<double> named_algebra(const std::string& name) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  if (head == "heisenberg") return heisenberg_algebra<double>();
  if (head == "milnor") {
    const auto v = parse_list(arg);
    if (v.size() != 3) throw InputError("milnor needs three values");
    return milnor_algebra(MilnorTriple<double>{v[0], v[1], v[2]});
  }
  if (head == "conullity2") return conullity2_frame(parse_double(arg));
  if (head == "perrone") return perrone_algebra(parse_double(arg));
  if (head == "table") {
    const auto c2 = arg.find(':');
    if (c2 == std::string::npos) throw InputError("table entries are table:FAMILY:theta");
    return milnor_algebra(table_triple(parse_family(arg.substr(0, c2)), parse_double(arg.substr(c2 + 1))));
  }
  throw InputError("unknown model '" + name + "'");
}

std::vector<double> write_splitting_csv(std::ostream& os, const SplittingState<double>& state,
                                        const std::vector<double>& ts, std::optional<double> kd0) {
  const auto k = state.c0.rows();
  os << "t";
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c) os << ",C_" << r << c;
  os << ",trC,detJ0";
  if (kd0) os << ",KD";
  os << "\n";
  std::vector<double> skipped;
  char buf[40];
  const auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  };
  for (double t : ts) {
    Eigen::MatrixXd c;
    try {
      c = splitting_at(state, t);
    } catch (const SingularityError&) {
      skipped.push_back(t);
      continue;
    }
    put(t);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index cc = 0; cc < k; ++cc) {
        os << ",";
        put(c(r, cc));
      }
    os << ",";
    put(c.trace());
    os << ",";
    put(j0_matrix(state, t).determinant());
    if (kd0) {
      os << ",";
      put(conullity2_evolution(*kd0, state.kappa, state.c0, t));
    }
    os << "\n";
  }
  return skipped;
}

}  // namespace nullity::io

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"
#include "kreinmap/fields.hpp"

namespace kreinmap {

using json = nlohmann::json;

namespace io {

inline json encode(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < m.cols(); ++b) row.push_back({m(a, b).real(), m(a, b).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double number(const json& v, const char* what) {
  if (!v.is_number()) throw InputError(std::string(what) + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(std::string(what) + ": non-finite entry");
  return d;
}

inline Mat decode(const json& rows, int r, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != r) throw InputError(std::string(what) + ": block has wrong row count");
  Mat m(r, r);
  for (int a = 0; a < r; ++a) {
    const json& row = rows[a];
    if (!row.is_array() || static_cast<int>(row.size()) != r) throw InputError(std::string(what) + ": block has wrong column count");
    for (int b = 0; b < r; ++b) {
      const json& z = row[b];
      if (!z.is_array() || z.size() != 2) throw InputError(std::string(what) + ": entries must be [re, im] pairs");
      m(a, b) = cplx(number(z[0], what), number(z[1], what));
    }
  }
  return m;
}

inline std::vector<Mat> decode_list(const json& arr, std::size_t count, int r, const char* what) {
  if (!arr.is_array() || arr.size() != count)
    throw InputError(std::string(what) + ": expected " + std::to_string(count) + " samples");
  std::vector<Mat> out;
  out.reserve(count);
  for (const json& b : arr) out.push_back(decode(b, r, what));
  return out;
}

inline int positive_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw InputError(std::string("field file: missing integer '") + key + "'");
  const int v = j[key].get<int>();
  if (v < 1) throw InputError(std::string("field file: '") + key + "' must be positive");
  return v;
}

}  // namespace io

inline json to_json(const Accelerant& h, const std::string& meta = "") {
  json j;
  j["kind"] = "accelerant";
  j["r"] = h.r();
  j["N"] = h.grid().cells();
  j["domain"] = {-1, 1};
  json data = json::array();
  for (const Mat& m : h.values()) data.push_back(io::encode(m));
  j["data"] = std::move(data);
  if (h.has_jump()) j["origin"] = {io::encode(h.origin_plus()), io::encode(h.origin_minus())};
  j["meta"] = meta;
  return j;
}

inline json to_json(const Potential& q, const std::string& meta = "") {
  json j;
  j["kind"] = "potential";
  j["r"] = q.r();
  j["N"] = q.grid().cells();
  j["domain"] = {0, 1};
  json plus = json::array(), minus = json::array();
  for (int i = 0; i < q.grid().nodes(); ++i) {
    plus.push_back(io::encode(q.q_plus(i)));
    minus.push_back(io::encode(q.q_minus(i)));
  }
  j["data"] = {std::move(plus), std::move(minus)};
  j["meta"] = meta;
  return j;
}

inline json to_json(const Kernel2D& k, const std::string& meta = "") {
  json j;
  j["kind"] = "kernel";
  j["r"] = k.n();
  j["N"] = k.grid().cells();
  j["domain"] = {{0, 1}, {0, 1}};
  j["support"] = to_string(k.support());
  json data = json::array();
  for (int i = 0; i < k.grid().nodes(); ++i)
    for (int t = 0; t < k.grid().nodes(); ++t) data.push_back(io::encode(k.block(i, t)));
  j["data"] = std::move(data);
  j["meta"] = meta;
  return j;
}

using Field = std::variant<Accelerant, Potential, Kernel2D>;

inline Field field_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw InputError("field file: missing 'kind'");
  if (!j.contains("data")) throw InputError("field file: missing 'data'");
  const std::string kind = j["kind"].get<std::string>();
  const int r = io::positive_int(j, "r");
  const GridSpec g(io::positive_int(j, "N"));
  const json& data = j["data"];
  if (kind == "accelerant") {
    auto values = io::decode_list(data, 4 * g.cells() + 1, r, "accelerant");
    if (!j.contains("origin")) return Accelerant(r, g, std::move(values));
    const auto origin = io::decode_list(j["origin"], 2, r, "accelerant origin");
    return Accelerant(r, g, std::move(values), origin[0], origin[1]);
  }
  if (kind == "potential") {
    const std::string layout = j.value("layout", std::string("blocks"));
    if (layout == "full") return potential_from_full(io::decode_list(data, g.nodes(), 2 * r, "potential"));
    if (layout != "blocks") throw InputError("potential: unknown layout '" + layout + "'");
    if (!data.is_array() || data.size() != 2) throw InputError("potential: data must hold [q_plus, q_minus]");
    return Potential(r, g, io::decode_list(data[0], g.nodes(), r, "potential q_plus"),
                     io::decode_list(data[1], g.nodes(), r, "potential q_minus"));
  }
  if (kind == "kernel") {
    const std::string s = j.value("support", std::string("full"));
    Support sup = s == "lower" ? Support::lower : s == "upper" ? Support::upper : Support::full;
    if (s != "lower" && s != "upper" && s != "full") throw InputError("kernel: unknown support '" + s + "'");
    const auto blocks = io::decode_list(data, static_cast<std::size_t>(g.nodes()) * g.nodes(), r, "kernel");
    Kernel2D k(r, g, sup);
    for (int i = 0; i < g.nodes(); ++i)
      for (int t = 0; t < g.nodes(); ++t) {
        const Mat& b = blocks[static_cast<std::size_t>(i) * g.nodes() + t];
        if (!in_support(sup, i, t) && b.cwiseAbs().maxCoeff() != 0.0)
          throw InputError("kernel: nonzero value outside the declared support");
        k.block(i, t) = b;
      }
    return k;
  }
  throw InputError("field file: unknown kind '" + kind + "'");
}

inline Field read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("cannot parse " + path + ": " + e.what());
  }
  return field_from_json(j);
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw InputError("write failed for " + path);
}

inline json report_to_json(const DiagnosticReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries()) {
    json v;
    v["name"] = e.name;
    if (std::isfinite(e.value))
      v["value"] = e.value;
    else
      v["value"] = nullptr;
    v["tolerance"] = e.tolerance;
    v["asserted"] = e.asserted;
    v["pass"] = e.passed();
    entries.push_back(std::move(v));
  }
  json j;
  j["entries"] = std::move(entries);
  j["N"] = rep.grid_cells;
  j["runtime_ms"] = rep.runtime_ms;
  j["pass"] = rep.all_passed();
  return j;
}

}  // namespace kreinmap

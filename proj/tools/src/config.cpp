#include "zscli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "zsspec/errors.hpp"

namespace zscli {

using nlohmann::json;
using zs::ErrorCode;
using zs::fail;

zs::AnchorSet FamilySpec::at(double t) const {
  std::vector<cplx> pts;
  for (const auto& [re, im] : anchors) pts.emplace_back(re.at(t), im.at(t));
  return zs::AnchorSet(pts);
}

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  fail(ErrorCode::InvalidInput, "config field " + path + ": " + what);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "expected an integer");
  return j.get<int>();
}

cplx point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) field_error(path, "expected [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

std::vector<cplx> points(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected a list of points");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<cplx>> point_lists(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected a list of point lists");
  std::vector<std::vector<cplx>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(points(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

zs::ConnectivityMatrix matrix(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected a square 0/1 matrix");
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) field_error(p, "expected a row");
    std::vector<int> row;
    for (std::size_t k = 0; k < j[i].size(); ++k) {
      const int v = integer(j[i][k], p + "[" + std::to_string(k) + "]");
      if (v != 0 && v != 1) field_error(p, "entries must be 0 or 1");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  try {
    return zs::ConnectivityMatrix::from_rows(rows);
  } catch (const zs::Error& e) {
    field_error(path, e.what());
  }
}

FamilyCoord coord(const json& j, const std::string& path) {
  if (j.is_number()) return {0.0, j.get<double>()};
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "t") return {1.0, 0.0};
    if (s == "-t") return {-1.0, 0.0};
    field_error(path, "expected a number, \"t\", \"-t\" or {\"t\": a, \"c\": b}");
  }
  if (j.is_object()) {
    FamilyCoord c;
    for (const auto& [k, v] : j.items()) {
      if (k == "t")
        c.a = number(v, path + ".t");
      else if (k == "c")
        c.b = number(v, path + ".c");
      else
        field_error(path + "." + k, "unknown key");
    }
    return c;
  }
  field_error(path, "expected a number, \"t\", \"-t\" or {\"t\": a, \"c\": b}");
}

FamilySpec family(const json& j) {
  if (!j.is_object()) field_error("family", "expected an object");
  FamilySpec f;
  for (const auto& [k, v] : j.items()) {
    const std::string p = "family." + k;
    if (k == "anchors") {
      if (!v.is_array()) field_error(p, "expected a list of [re, im]");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string q = p + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != 2) field_error(q, "expected [re, im]");
        f.anchors.emplace_back(coord(v[i][0], q + "[0]"), coord(v[i][1], q + "[1]"));
      }
    } else if (k == "lo") {
      f.lo = number(v, p);
    } else if (k == "hi") {
      f.hi = number(v, p);
    } else if (k == "n") {
      f.n = integer(v, p);
    } else if (k == "bracket_tol") {
      f.bracket_tol = number(v, p);
    } else {
      field_error(p, "unknown key");
    }
  }
  if (f.anchors.empty()) field_error("family.anchors", "missing");
  if (!(f.hi > f.lo)) field_error("family", "needs lo < hi");
  if (f.n < 2) field_error("family.n", "needs at least 2 points");
  if (!(f.bracket_tol > 0.0)) field_error("family.bracket_tol", "must be positive");
  return f;
}

void tolerances(const json& j, Tolerances& t) {
  if (!j.is_object()) field_error("tolerances", "expected an object");
  for (const auto& [k, v] : j.items()) {
    const std::string p = "tolerances." + k;
    if (k == "boutroux")
      t.boutroux = number(v, p);
    else if (k == "bc")
      t.bc = number(v, p);
    else if (k == "traj")
      t.traj = number(v, p);
    else if (k == "energy")
      t.energy = number(v, p);
    else if (k == "s_property")
      t.s_property = number(v, p);
    else if (k == "schiffer")
      t.schiffer = number(v, p);
    else
      field_error(p, "unknown key");
  }
}

const std::set<std::string> kChecks{"boutroux", "s_property", "schiffer", "jenkins", "energy", "stagnation", "descent"};

}  // namespace

void JobConfig::validate() const {
  const std::pair<const char*, double> tols[] = {{"boutroux", tol.boutroux}, {"bc", tol.bc},
                                                 {"traj", tol.traj},         {"energy", tol.energy},
                                                 {"s_property", tol.s_property}, {"schiffer", tol.schiffer}};
  for (const auto& [name, v] : tols)
    if (!(v > 0.0)) field_error(std::string("tolerances.") + name, "must be positive");
  if (samples <= 0) field_error("samples", "n_samples must be positive");
  if (grid_res < 8) field_error("grid_res", "must be at least 8");
  for (std::size_t i = 0; i < anchors.size(); ++i)
    if (!(anchors[i].imag() > 0.0)) field_error("anchors[" + std::to_string(i) + "]", "anchor below real axis");
  if (!anchors.empty()) {
    try {
      zs::AnchorSet check(anchors);
    } catch (const zs::Error& e) {
      field_error("anchors", e.what());
    }
  }
  if (connectivity && connectivity->anchors() != anchors.size())
    field_error("connectivity", "needs N+1 rows for N anchors");
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (family && classes[i].anchors() != family->anchors.size())
      field_error("classes[" + std::to_string(i) + "]", "needs N+1 rows for the N family anchors");
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].size() < 2) field_error("arcs[" + std::to_string(i) + "]", "an arc needs at least two points");
  if (!field.empty() && !(field.back() > 0.0)) field_error("field", "leading coefficient must be positive");
}

JobConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidInput, std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "config must be a JSON object");
  JobConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "command") {
      if (!v.is_string()) field_error(k, "expected a string");
      c.command = v.get<std::string>();
    } else if (k == "anchors") {
      c.anchors = points(v, k);
    } else if (k == "connectivity") {
      c.connectivity = matrix(v, k);
    } else if (k == "arcs") {
      c.arcs = point_lists(v, k);
    } else if (k == "odd_zero_seeds") {
      c.odd_zero_seeds = point_lists(v, k);
    } else if (k == "field") {
      if (!v.is_array()) field_error(k, "expected a list of coefficients");
      for (std::size_t i = 0; i < v.size(); ++i) c.field.push_back(number(v[i], k + "[" + std::to_string(i) + "]"));
    } else if (k == "checks") {
      if (!v.is_array()) field_error(k, "expected a list of check names");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = k + "[" + std::to_string(i) + "]";
        if (!v[i].is_string() || !kChecks.count(v[i].get<std::string>())) field_error(p, "unknown check");
        c.checks.push_back(v[i].get<std::string>());
      }
    } else if (k == "classes") {
      if (!v.is_array()) field_error(k, "expected a list of matrices");
      for (std::size_t i = 0; i < v.size(); ++i) c.classes.push_back(matrix(v[i], k + "[" + std::to_string(i) + "]"));
    } else if (k == "family") {
      c.family = family(v);
    } else if (k == "tolerances") {
      tolerances(v, c.tol);
    } else if (k == "out") {
      if (!v.is_string()) field_error(k, "expected a string");
      c.out = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_unsigned()) field_error(k, "expected a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (k == "samples") {
      c.samples = integer(v, k);
    } else if (k == "grid_res") {
      c.grid_res = integer(v, k);
    } else if (k == "svg") {
      if (!v.is_boolean()) field_error(k, "expected true or false");
      c.svg = v.get<bool>();
    } else {
      field_error(k, "unknown key");
    }
  }
  c.validate();
  return c;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const JobConfig& c) {
  auto pts = [](const std::vector<cplx>& v) {
    json a = json::array();
    for (const cplx& z : v) a.push_back({z.real(), z.imag()});
    return a;
  };
  json j;
  j["command"] = c.command;
  j["anchors"] = pts(c.anchors);
  if (c.connectivity) j["connectivity"] = c.connectivity->rows();
  if (!c.arcs.empty()) {
    j["arcs"] = json::array();
    for (const auto& a : c.arcs) j["arcs"].push_back(pts(a));
  }
  if (!c.odd_zero_seeds.empty()) {
    j["odd_zero_seeds"] = json::array();
    for (const auto& a : c.odd_zero_seeds) j["odd_zero_seeds"].push_back(pts(a));
  }
  if (!c.field.empty()) j["field"] = c.field;
  if (!c.checks.empty()) j["checks"] = c.checks;
  if (!c.classes.empty()) {
    j["classes"] = json::array();
    for (const auto& m : c.classes) j["classes"].push_back(m.rows());
  }
  if (c.family) {
    json f;
    f["anchors"] = json::array();
    for (const auto& [re, im] : c.family->anchors)
      f["anchors"].push_back({{{"t", re.a}, {"c", re.b}}, {{"t", im.a}, {"c", im.b}}});
    f["lo"] = c.family->lo;
    f["hi"] = c.family->hi;
    f["n"] = c.family->n;
    f["bracket_tol"] = c.family->bracket_tol;
    j["family"] = f;
  }
  j["tolerances"] = {{"boutroux", c.tol.boutroux}, {"bc", c.tol.bc},
                     {"traj", c.tol.traj},         {"energy", c.tol.energy},
                     {"s_property", c.tol.s_property}, {"schiffer", c.tol.schiffer}};
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["grid_res"] = c.grid_res;
  j["svg"] = c.svg;
  return j.dump(2);
}

}  // namespace zscli

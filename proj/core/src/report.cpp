#include "csq/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csq/error.hpp"

namespace csq::report {

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(std::ostringstream& out, const Json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float: out << number(j.get<double>()); return;
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << "," << nl;
        first = false;
        out << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        emit(out, it.value(), indent, level + 1);
      }
      out << nl << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[" << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << "," << nl;
        out << pad;
        emit(out, j[i], indent, level + 1);
      }
      out << nl << close << "]";
      return;
    }
    default: out << j.dump(); return;
  }
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::ostringstream out;
  emit(out, j, indent, 0);
  out << "\n";
  return out.str();
}

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw ConfigError("Table: row width does not match header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << number(r[i]);
    out << "\n";
  }
  return out.str();
}

Json Table::to_json() const {
  Json j{{"columns", columns}, {"rows", Json::array()}};
  for (const auto& r : rows) j["rows"].push_back(r);
  return j;
}

bool Report::pass() const {
  for (const auto& s : suites)
    if (!s.pass) return false;
  return !suites.empty();
}

Json Report::to_json() const {
  Json j;
  j["config"] = config;
  j["suites"] = Json::array();
  for (const auto& s : suites) {
    Json sj;
    sj["name"] = s.name;
    sj["status"] = s.pass ? "pass" : "fail";
    sj["residuals"] = s.residuals;
    sj["tables"] = Json::object();
    for (const auto& [name, t] : s.tables) sj["tables"][name] = t.to_json();
    if (!s.details.empty()) sj["details"] = s.details;
    j["suites"].push_back(sj);
  }
  j["pass"] = pass();
  return j;
}

Json to_json(const axioms::ResidualSet& r) {
  return Json{{"sup", r.sup},
              {"mean", r.mean},
              {"count", r.values.size()},
              {"max_quadrature_error", r.max_quadrature_error},
              {"max_tail_bound", r.max_tail_bound}};
}

Json to_json(const axioms::AxiomReport& r) {
  Json j{{"model", r.model},
         {"samples", r.samples},
         {"calibration", r.calibration},
         {"calibration_spread", r.calibration_spread},
         {"checks", Json::array()},
         {"pass", r.pass}};
  for (const auto& c : r.checks) {
    Json cj{{"name", c.name},
            {"status", c.pass ? "pass" : "fail"},
            {"tolerance", c.tolerance},
            {"residuals", to_json(c.residuals)}};
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  return j;
}

Json to_json(const quantize::QuantOperator& a) {
  Json entries = Json::array();
  for (int j = 0; j < a.dim(); ++j)
    for (int k = 0; k < a.dim(); ++k)
      entries.push_back({a.entries(j, k).real(), a.entries(j, k).imag()});
  return Json{{"dim", a.dim()}, {"label", a.label}, {"entries", entries}};
}

Json to_json(const starprod::CoeffMatrix& a) {
  Json entries = Json::array();
  for (int j = 0; j <= a.level(); ++j)
    for (int k = 0; k <= a.level(); ++k) {
      const cplx v = a.entry(j, k);
      entries.push_back({v.real(), v.imag()});
    }
  return Json{{"level", a.level()}, {"entries", entries}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

}  // namespace csq::report

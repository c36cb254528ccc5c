#pragma once

// JSON and CSV emission for suite results.

#include <json.hpp>
#include <string>
#include <vector>

#include "csq/axioms.hpp"
#include "csq/quantize.hpp"
#include "csq/starprod.hpp"

namespace csq::report {

using Json = nlohmann::ordered_json;

/// Serializes with every floating-point number printed as %.17g and
/// non-finite numbers as null.
std::string dump(const Json& j, int indent = 2);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  /// Header row then one comma-separated line per row.
  std::string to_csv() const;
  Json to_json() const;
};

struct Suite {
  std::string name;
  bool pass = false;
  Json residuals = Json::object();
  std::vector<std::pair<std::string, Table>> tables;
  Json details = Json::object();
};

struct Report {
  Json config = Json::object();
  std::vector<Suite> suites;

  bool pass() const;
  Json to_json() const;
};

Json to_json(const axioms::ResidualSet& r);
Json to_json(const axioms::AxiomReport& r);
/// {"dim", "label", "entries": row-major [re, im] pairs}.
Json to_json(const quantize::QuantOperator& a);
/// {"level", "entries"} with a_jk in floating point.
Json to_json(const starprod::CoeffMatrix& a);

void write_file(const std::string& path, const std::string& content);

}  // namespace csq::report

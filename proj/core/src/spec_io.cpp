#include "amalgam/spec_io.hpp"

#include "amalgam/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace amalgam::io {

JointCumulantSpec SpecFile::cumulants() const {
  if (kind != SeriesKind::cumulant) throw ArgumentError("expected a spec of kind \"cumulant\", got \"moment\"");
  return JointCumulantSpec(table);
}

JointMomentSpec SpecFile::moments() const {
  if (kind != SeriesKind::moment) throw ArgumentError("expected a spec of kind \"moment\", got \"cumulant\"");
  return JointMomentSpec(table);
}

std::string_view kind_name(SeriesKind kind) { return kind == SeriesKind::cumulant ? "cumulant" : "moment"; }

namespace {

std::size_t pow_size(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// Non-negative JSON integer; the parser stores literals written by hand as signed.
bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

std::size_t positive_field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("spec is missing \"") + key + "\"");
  const json& v = doc.at(key);
  if (!is_count(v) || v.get<std::size_t>() == 0) {
    throw ParseError(std::string("spec field \"") + key + "\" must be a positive integer");
  }
  return v.get<std::size_t>();
}

Rational rational_field(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": rationals are encoded as \"p/q\" strings");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

// 1-based [i, j] pair of matrix-unit indices.
std::size_t unit_index(const json& v, std::size_t d, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !is_count(v[0]) || !is_count(v[1])) {
    throw ParseError(where + ": matrix unit must be [row, col]");
  }
  const auto i = v[0].get<std::size_t>();
  const auto j = v[1].get<std::size_t>();
  if (i < 1 || i > d || j < 1 || j > d) {
    throw DimensionError(where + ": matrix unit [" + std::to_string(i) + ", " + std::to_string(j) +
                         "] outside 1.." + std::to_string(d));
  }
  return (i - 1) * d + (j - 1);
}

MultilinearMap dense_coefficient(const json& c, std::size_t d, std::size_t arity, const std::string& where) {
  const std::size_t rows = d * d;
  const std::size_t cols = pow_size(d * d, arity);
  if (c.size() != rows) {
    throw DimensionError(where + ": coefficient has " + std::to_string(c.size()) + " rows, expected " +
                         std::to_string(rows));
  }
  MultilinearMap m(d, arity);
  for (std::size_t out = 0; out < rows; ++out) {
    const json& row = c[out];
    if (!row.is_array() || row.size() != cols) {
      throw DimensionError(where + ": coefficient row " + std::to_string(out) + " must have " +
                           std::to_string(cols) + " columns");
    }
    for (std::size_t in = 0; in < cols; ++in) {
      m.at(out, in) = rational_field(row[in], where + ", row " + std::to_string(out) + ", column " + std::to_string(in));
    }
  }
  return m;
}

MultilinearMap sparse_coefficient(const json& c, std::size_t d, std::size_t arity, const std::string& where) {
  std::vector<SparseEntry> entries;
  std::set<std::pair<std::size_t, std::vector<std::size_t>>> seen;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const std::string at = where + ", sparse item " + std::to_string(k);
    const json& item = c[k];
    if (!item.is_object() || !item.contains("out") || !item.contains("in") || !item.contains("val")) {
      throw ParseError(at + ": sparse items need \"out\", \"in\" and \"val\"");
    }
    const std::size_t out = unit_index(item["out"], d, at);
    const json& ins = item["in"];
    if (!ins.is_array() || ins.size() != arity) {
      throw DimensionError(at + ": expected " + std::to_string(arity) + " input units");
    }
    SparseEntry e;
    e.out_row = out / d;
    e.out_col = out % d;
    std::vector<std::size_t> flat_in;
    for (const json& u : ins) {
      const std::size_t idx = unit_index(u, d, at);
      e.inputs.emplace_back(idx / d, idx % d);
      flat_in.push_back(idx);
    }
    if (!seen.emplace(out, flat_in).second) throw StructuralError(at + ": duplicate position");
    e.value = rational_field(item["val"], at);
    entries.push_back(std::move(e));
  }
  return MultilinearMap::from_sparse(d, arity, entries);
}

}  // namespace

SpecFile parse_spec(const json& doc) {
  if (!doc.is_object()) throw ParseError("spec must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "d" && key != "s" && key != "N" && key != "kind" && key != "entries") {
      throw ParseError("unknown spec field \"" + key + "\"");
    }
  }
  const std::size_t d = positive_field(doc, "d");
  const std::size_t s = positive_field(doc, "s");
  const std::size_t n_max = positive_field(doc, "N");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ParseError("spec is missing \"kind\"");
  SpecFile out;
  const auto kind = doc["kind"].get<std::string>();
  if (kind == "cumulant") {
    out.kind = SeriesKind::cumulant;
  } else if (kind == "moment") {
    out.kind = SeriesKind::moment;
  } else {
    throw ParseError("spec kind must be \"cumulant\" or \"moment\", got \"" + kind + "\"");
  }
  if (!doc.contains("entries") || !doc["entries"].is_array()) throw ParseError("spec is missing \"entries\"");
  out.table = SeriesTable(d, s, n_max);
  std::set<IndexTuple> seen;
  const json& entries = doc["entries"];
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const json& entry = entries[e];
    std::string where = "entries[" + std::to_string(e) + "]";
    if (!entry.is_object() || !entry.contains("order") || !entry.contains("indices") || !entry.contains("coefficient")) {
      throw ParseError(where + ": entries need \"order\", \"indices\" and \"coefficient\"");
    }
    if (!is_count(entry["order"])) throw ParseError(where + ": order must be a positive integer");
    const auto order = entry["order"].get<std::size_t>();
    if (order < 1 || order > n_max) {
      throw DimensionError(where + ": order " + std::to_string(order) + " outside 1.." + std::to_string(n_max));
    }
    const json& idx = entry["indices"];
    if (!idx.is_array() || idx.size() != order) {
      throw DimensionError(where + ": indices must list " + std::to_string(order) + " variables");
    }
    IndexTuple key;
    for (const json& v : idx) {
      if (!is_count(v) || v.get<std::size_t>() < 1 || v.get<std::size_t>() > s) {
        throw DimensionError(where + ": variable indices must lie in 1.." + std::to_string(s));
      }
      key.push_back(v.get<int>());
    }
    where += " (indices " + idx.dump() + ")";
    if (!seen.insert(key).second) throw StructuralError(where + ": duplicate entry");
    const json& c = entry["coefficient"];
    if (!c.is_array()) throw ParseError(where + ": coefficient must be an array");
    const bool sparse = !c.empty() && c[0].is_object();
    MultilinearMap m = sparse ? sparse_coefficient(c, d, order - 1, where) : dense_coefficient(c, d, order - 1, where);
    out.table.set(key, std::move(m));
  }
  return out;
}

SpecFile parse_spec_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_spec(doc);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

SpecFile load_spec(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  try {
    return parse_spec(doc);
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json spec_to_json(const SeriesTable& table, SeriesKind kind) {
  std::vector<const std::pair<const IndexTuple, MultilinearMap>*> items;
  for (const auto& item : table.entries()) items.push_back(&item);
  std::stable_sort(items.begin(), items.end(), [](const auto* a, const auto* b) {
    if (a->first.size() != b->first.size()) return a->first.size() < b->first.size();
    return a->first < b->first;
  });
  const std::size_t d = table.dim();
  json entries = json::array();
  for (const auto* item : items) {
    const MultilinearMap& m = item->second;
    json coefficient = json::array();
    for (std::size_t out = 0; out < d * d; ++out) {
      json row = json::array();
      for (std::size_t in = 0; in < m.input_count(); ++in) row.push_back(to_string(m.at(out, in)));
      coefficient.push_back(std::move(row));
    }
    entries.push_back({{"order", item->first.size()}, {"indices", item->first}, {"coefficient", std::move(coefficient)}});
  }
  return {{"d", d},
          {"s", table.variables()},
          {"N", table.truncation()},
          {"kind", kind_name(kind)},
          {"entries", std::move(entries)}};
}

std::string dump_canonical(const json& doc) { return doc.dump(2) + "\n"; }

json matrix_to_json(const BMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

BMatrix matrix_from_json(const json& doc) {
  if (!doc.is_array() || doc.empty()) throw ParseError("matrix must be a nonempty array of rows");
  const std::size_t d = doc.size();
  std::vector<Rational> entries;
  for (std::size_t i = 0; i < d; ++i) {
    if (!doc[i].is_array() || doc[i].size() != d) {
      throw DimensionError("matrix row " + std::to_string(i) + " must have " + std::to_string(d) + " entries");
    }
    for (std::size_t j = 0; j < d; ++j) {
      entries.push_back(rational_field(doc[i][j], "matrix entry (" + std::to_string(i) + ", " + std::to_string(j) + ")"));
    }
  }
  return BMatrix(d, std::move(entries));
}

BMatrix load_matrix(const std::filesystem::path& path) {
  try {
    return matrix_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json verdict_to_json(const Verdict& v) {
  json out{{"pass", v.pass}, {"checked_orders", v.checked_orders}};
  if (!v.detail.empty()) out["detail"] = v.detail;
  if (v.witness_tuple) out["witness_tuple"] = json::array({v.witness_tuple->size(), *v.witness_tuple});
  if (v.witness_args) {
    json args = json::array();
    for (const auto& [r, c] : *v.witness_args) args.push_back({r + 1, c + 1});
    out["witness_args"] = std::move(args);
  }
  if (v.residual) out["residual"] = matrix_to_json(*v.residual);
  return out;
}

std::string verdict_to_text(const Verdict& v) {
  std::ostringstream out;
  out << (v.pass ? "pass" : "FAIL");
  if (!v.detail.empty()) out << " (" << v.detail << ")";
  out << "; orders";
  for (std::size_t n : v.checked_orders) out << ' ' << n;
  if (v.witness_tuple) {
    out << "; witness (" << v.witness_tuple->size() << ", (";
    for (std::size_t i = 0; i < v.witness_tuple->size(); ++i) out << (i ? "," : "") << (*v.witness_tuple)[i];
    out << "))";
  }
  if (v.witness_args && !v.witness_args->empty()) {
    out << " at";
    for (const auto& [r, c] : *v.witness_args) out << " E" << r + 1 << c + 1;
  }
  if (v.residual) out << "; residual " << v.residual->to_string();
  return out.str();
}

}  // namespace amalgam::io

#pragma once

// Tabular output: a typed column schema, rows of cells, and a meta object.
// JSON layout: {"meta": {..., "columns": [[name, type], ...]}, "rows": [{...}]}.
// CSV layout: one "# meta " line holding the meta object as compact JSON, a
// header line, then the rows. Complex cells are [re, im] in JSON and two
// columns name_re, name_im in CSV. Both formats parse back into the same Table
// and re-emit byte-identically.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qspecial.hpp"

namespace ellface {

using ojson = nlohmann::ordered_json;

enum class CellType { str, integer, real, complex, boolean };

inline char type_code(CellType t) { return "sifcb"[static_cast<int>(t)]; }

inline CellType parse_type_code(const std::string& c) {
  static const std::string codes = "sifcb";
  const auto k = c.size() == 1 ? codes.find(c[0]) : std::string::npos;
  if (k == std::string::npos) throw Error(ErrorKind::domain, "unknown column type '" + c + "'");
  return static_cast<CellType>(k);
}

struct Column {
  std::string name;
  CellType type;
};

using Cell = std::variant<std::monostate, std::string, long long, double, cplx, bool>;

struct Table {
  ojson meta = ojson::object();
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  int col(const std::string& name) const {
    for (size_t k = 0; k < columns.size(); ++k)
      if (columns[k].name == name) return static_cast<int>(k);
    throw Error(ErrorKind::domain, "no column '" + name + "'");
  }
  std::vector<Cell> blank_row() const { return std::vector<Cell>(columns.size()); }
};

// shortest round-trip decimal form; non-finite values as inf, -inf, nan
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::domain, "malformed number '" + s + "'");
  return v;
}

inline ojson double_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double json_to_double(const ojson& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

inline ojson cplx_to_json(cplx z) { return ojson::array({double_to_json(z.real()), double_to_json(z.imag())}); }

inline ojson columns_json(const std::vector<Column>& cols) {
  ojson a = ojson::array();
  for (const auto& c : cols) a.push_back(ojson::array({c.name, std::string(1, type_code(c.type))}));
  return a;
}

inline std::vector<Column> columns_from_json(const ojson& a) {
  std::vector<Column> cols;
  for (const auto& c : a) cols.push_back({c.at(0).get<std::string>(), parse_type_code(c.at(1).get<std::string>())});
  return cols;
}

inline ojson cell_to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<V, double>) return double_to_json(v);
        else if constexpr (std::is_same_v<V, cplx>) return cplx_to_json(v);
        else return v;
      },
      c);
}

inline Cell cell_from_json(const ojson& j, CellType t) {
  if (j.is_null()) return std::monostate{};
  switch (t) {
    case CellType::str: return j.get<std::string>();
    case CellType::integer: return j.get<long long>();
    case CellType::real: return json_to_double(j);
    case CellType::complex: return cplx(json_to_double(j.at(0)), json_to_double(j.at(1)));
    case CellType::boolean: return j.get<bool>();
  }
  return std::monostate{};
}

inline ojson meta_with_columns(const Table& t) {
  ojson m = t.meta;
  m["columns"] = columns_json(t.columns);
  return m;
}

inline std::string to_json_text(const Table& t) {
  ojson doc = ojson::object();
  doc["meta"] = meta_with_columns(t);
  ojson rows = ojson::array();
  for (const auto& r : t.rows) {
    ojson o = ojson::object();
    for (size_t k = 0; k < t.columns.size(); ++k) o[t.columns[k].name] = cell_to_json(r[k]);
    rows.push_back(std::move(o));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

inline Table from_json_text(const std::string& text) {
  const ojson doc = ojson::parse(text);
  Table t;
  t.meta = doc.at("meta");
  t.columns = columns_from_json(t.meta.at("columns"));
  t.meta.erase("columns");
  for (const auto& o : doc.at("rows")) {
    auto row = t.blank_row();
    for (size_t k = 0; k < t.columns.size(); ++k) row[k] = cell_from_json(o.at(t.columns[k].name), t.columns[k].type);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string to_csv_text(const Table& t) {
  std::ostringstream os;
  os << "# meta " << meta_with_columns(t).dump() << "\n";
  std::vector<std::string> head;
  for (const auto& c : t.columns) {
    if (c.type == CellType::complex) {
      head.push_back(c.name + "_re");
      head.push_back(c.name + "_im");
    } else {
      head.push_back(c.name);
    }
  }
  for (size_t k = 0; k < head.size(); ++k) os << (k ? "," : "") << csv_quote(head[k]);
  os << "\n";
  for (const auto& r : t.rows) {
    std::vector<std::string> cells;
    for (size_t k = 0; k < t.columns.size(); ++k) {
      const Cell& c = r[k];
      if (t.columns[k].type == CellType::complex) {
        if (std::holds_alternative<cplx>(c)) {
          cells.push_back(format_double(std::get<cplx>(c).real()));
          cells.push_back(format_double(std::get<cplx>(c).imag()));
        } else {
          cells.push_back("");
          cells.push_back("");
        }
        continue;
      }
      cells.push_back(std::visit(
          [](const auto& v) -> std::string {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) return "";
            else if constexpr (std::is_same_v<V, std::string>) return v;
            else if constexpr (std::is_same_v<V, double>) return format_double(v);
            else if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<V, long long>) return std::to_string(v);
            else return "";
          },
          c));
    }
    for (size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << csv_quote(cells[k]);
    os << "\n";
  }
  return os.str();
}

inline Table from_csv_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("# meta ", 0) != 0) throw Error(ErrorKind::domain, "CSV lacks meta line");
  Table t;
  t.meta = ojson::parse(line.substr(7));
  t.columns = columns_from_json(t.meta.at("columns"));
  t.meta.erase("columns");
  if (!std::getline(is, line)) throw Error(ErrorKind::domain, "CSV lacks header line");
  while (std::getline(is, line)) {
    const auto f = csv_split(line);
    auto row = t.blank_row();
    size_t pos = 0;
    for (size_t k = 0; k < t.columns.size(); ++k) {
      const auto need = [&](size_t w) {
        if (pos + w > f.size()) throw Error(ErrorKind::domain, "CSV row too short");
      };
      if (t.columns[k].type == CellType::complex) {
        need(2);
        if (!f[pos].empty()) row[k] = cplx(parse_double(f[pos]), parse_double(f[pos + 1]));
        pos += 2;
        continue;
      }
      need(1);
      const std::string& s = f[pos++];
      if (s.empty()) continue;
      switch (t.columns[k].type) {
        case CellType::str: row[k] = s; break;
        case CellType::integer: row[k] = std::stoll(s); break;
        case CellType::real: row[k] = parse_double(s); break;
        case CellType::boolean: row[k] = (s == "true"); break;
        default: break;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::string render(const Table& t, const std::string& format) {
  if (format == "json") return to_json_text(t);
  if (format == "csv") return to_csv_text(t);
  throw Error(ErrorKind::domain, "unknown format '" + format + "'");
}

inline Table parse_table(const std::string& text) {
  if (text.rfind("# meta ", 0) == 0) return from_csv_text(text);
  return from_json_text(text);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::domain, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::domain, "cannot write '" + path + "'");
  out << text;
}

// Run fn(i) for i in [0, n) on up to `workers` threads. Results are written by
// index, so output order never depends on completion order.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(n);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

inline int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace ellface

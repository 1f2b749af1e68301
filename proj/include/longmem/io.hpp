// File formats: single-column CSV, flat key-value configs, and a small JSON
// emitter. All floating-point output goes through %.17g so doubles survive a
// round trip bit-exactly and reruns diff clean.

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace longmem {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- CSV ----------------------------------------------------------------

inline void write_csv_column(std::ostream& os, const std::string& header,
                             const std::vector<double>& values) {
  os << header << "\n";
  for (double v : values) os << format_double(v) << "\n";
}

inline void write_csv_column(const std::string& path, const std::string& header,
                             const std::vector<double>& values) {
  std::ofstream os(path, std::ios::binary);  // binary: LF endings everywhere
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_csv_column(os, header, values);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Single-column CSV with a mandatory header line.
inline std::vector<double> read_csv_column(std::istream& is,
                                           const std::string& expected_header) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("csv: empty input");
  if (trim(line) != expected_header)
    throw std::runtime_error("csv: expected header '" + expected_header +
                             "', got '" + trim(line) + "'");
  std::vector<double> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(t, &pos);
      if (pos != t.size()) throw std::invalid_argument("trailing characters");
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error("csv: cannot parse line " +
                               std::to_string(lineno) + ": '" + t + "'");
    }
  }
  return out;
}

inline std::vector<double> read_csv_column(const std::string& path,
                                           const std::string& expected_header) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return read_csv_column(is, expected_header);
}

// --- key = value config files -------------------------------------------
//
// Grammar: one "key = value" pair per line; '#' starts a comment; blank
// lines ignored; keys and values are trimmed. Duplicate keys are an error.

inline std::map<std::string, std::string> parse_kv(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key on line " +
                               std::to_string(lineno));
    if (!kv.emplace(key, val).second)
      throw std::runtime_error("config: duplicate key '" + key + "'");
  }
  return kv;
}

inline std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  return parse_kv(is);
}

// --- JSON ---------------------------------------------------------------
//
// Emits pretty-printed JSON. Caller drives structure; numbers print with
// %.17g.

class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(const std::string& k) {
    comma();
    indent();
    os_ << '"' << escape(k) << "\": ";
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double v) { return raw(format_double(v)); }
  JsonWriter& value(int v) { return raw(std::to_string(v)); }
  JsonWriter& value(unsigned long v) { return raw(std::to_string(v)); }
  JsonWriter& value(unsigned long long v) { return raw(std::to_string(v)); }
  JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
  JsonWriter& value(const std::string& s) {
    return raw('"' + escape(s) + '"');
  }
  JsonWriter& value(const char* s) { return value(std::string(s)); }

  JsonWriter& value(const std::vector<double>& v) {
    begin_array();
    for (double x : v) value(x);
    return end_array();
  }

  template <typename T>
  JsonWriter& kv(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }

 private:
  JsonWriter& open(char c) {
    if (!pending_value_) {
      comma();
      indent();
    }
    pending_value_ = false;
    os_ << c;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) {
      os_ << '\n';
      indent_only();
    }
    os_ << c;
    if (first_.empty()) os_ << '\n';
    return *this;
  }
  JsonWriter& raw(const std::string& s) {
    if (!pending_value_) {
      comma();
      indent();
    }
    pending_value_ = false;
    os_ << s;
    return *this;
  }
  void comma() {
    if (first_.empty()) return;
    if (!first_.back()) os_ << ',';
    first_.back() = false;
    os_ << '\n';
  }
  void indent() { indent_only(); }
  void indent_only() {
    for (std::size_t i = 0; i < first_.size(); ++i) os_ << "  ";
  }
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    return out;
  }

  std::ostream& os_;
  std::vector<bool> first_;
  bool pending_value_ = true;  // top-level value may start immediately
};

}  // namespace longmem

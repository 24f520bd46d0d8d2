#include "bshq_cli/writer.hpp"

#include <cmath>
#include <cstdio>

namespace bshq::cli {

namespace {

std::string printf_g(const char *format, double v) {
  if (!std::isfinite(v))
    return "null";
  if (v == 0.0)
    return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

bool scalar(const ojson &v) { return !v.is_array() && !v.is_object(); }

void write_scalar(const ojson &v, std::string &out) {
  if (v.is_number_float())
    out += format_json_number(v.get<double>());
  else
    out += v.dump();
}

void write(const ojson &v, int depth, std::string &out) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto &[key, value] : v.items()) {
      if (!first)
        out += ",\n";
      first = false;
      out += pad + ojson(key).dump() + ": ";
      write(value, depth + 1, out);
    }
    out += "\n" + close + "}";
    return;
  }
  if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    bool flat = true;
    for (const auto &e : v)
      flat = flat && scalar(e);
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
          out += ", ";
        write_scalar(v[i], out);
      }
      out += "]";
      return;
    }
    // Arrays of short scalar arrays (complex pairs, quantum numbers) stay on
    // one line per element.
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i)
        out += ",\n";
      out += pad;
      write(v[i], depth + 1, out);
    }
    out += "\n" + close + "]";
    return;
  }
  write_scalar(v, out);
}

} // namespace

std::string format_json_number(double v) { return printf_g("%.17g", v); }

std::string format_csv_number(double v) {
  if (!std::isfinite(v))
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  return printf_g("%.12g", v);
}

std::string write_json(const ojson &doc) {
  std::string out;
  write(doc, 0, out);
  out += "\n";
  return out;
}

std::string csv_row(const std::vector<std::string> &cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i)
      out += ',';
    const std::string &c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out += c;
      continue;
    }
    out += '"';
    for (char ch : c) {
      if (ch == '"')
        out += '"';
      out += ch;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

} // namespace bshq::cli

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "qgraph/cxmath.hpp"

namespace qgraph {

// Minimal streaming JSON emitter. Keys stay in emission order and numbers are
// printed with 17 significant digits, so identical runs produce identical bytes.
class JsonWriter {
 public:
  std::string take() { return std::move(out_); }

  JsonWriter& begin_object() {
    comma();
    out_ += '{';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    fresh_ = false;
    return *this;
  }
  JsonWriter& begin_array() {
    comma();
    out_ += '[';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    fresh_ = false;
    return *this;
  }
  JsonWriter& key(std::string_view k) {
    comma();
    append_string(k);
    out_ += ':';
    fresh_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    comma();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ += buf;
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(int v) {
    comma();
    out_ += std::to_string(v);
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(bool v) {
    comma();
    out_ += v ? "true" : "false";
    fresh_ = false;
    return *this;
  }
  JsonWriter& value(std::string_view s) {
    comma();
    append_string(s);
    fresh_ = false;
    return *this;
  }
  // Keep string literals away from the bool overload.
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(Complex z) {
    begin_object();
    key("re").value(z.real());
    key("im").value(z.imag());
    return end_object();
  }

 private:
  void comma() {
    if (!fresh_ && !out_.empty()) {
      const char c = out_.back();
      if (c != '{' && c != '[' && c != ':') out_ += ',';
    }
    fresh_ = false;
  }
  void append_string(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"':
          out_ += "\\\"";
          break;
        case '\\':
          out_ += "\\\\";
          break;
        case '\n':
          out_ += "\\n";
          break;
        case '\t':
          out_ += "\\t";
          break;
        default:
          out_ += c;
      }
    }
    out_ += '"';
  }

  std::string out_;
  bool fresh_ = true;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace qgraph

#pragma once

// Scenario configuration files: flat `key = value` lines with typed values.
//
//   # reference scenario, two rules
//   embedding = "reference"      # reference | cohesion | absorption | explicit
//   group_size = 20
//   sigma_f = 1.0
//   rules = ["rv", "ev"]
//   embedding_rows = [[1, 0],
//                     [0, 1]]    # explicit embeddings only
//
// Values are numbers, "strings", true/false or [arrays]; arrays may span
// lines. Every error names the offending key and line.

#include "corrvote/experiments.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace corrvote {

class ConfigError : public UsageError {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : UsageError("line " + std::to_string(line) + ": key '" + key + "': " + what),
        key_(key),
        line_(line) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<double, std::string, bool, Array> data;
};

struct ParsedConfig {
  ScenarioConfig scenario;
  std::optional<std::string> sweep_parameter;
  std::vector<double> sweep_values;
  bool seed_set = false;
};

namespace detail {

class ValueParser {
 public:
  ValueParser(std::string_view text, std::string key, int line)
      : text_(text), key_(std::move(key)), line_(line) {}

  ConfigValue parse() {
    ConfigValue v = value();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(key_, line_, what); }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  ConfigValue value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '[') return array();
    if (c == '"') return string();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return ConfigValue{true};
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return ConfigValue{false};
    }
    return number();
  }

  ConfigValue array() {
    ++pos_;  // '['
    ConfigValue::Array items;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return ConfigValue{std::move(items)};
    }
    for (;;) {
      items.push_back(value());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return ConfigValue{std::move(items)};
      }
      fail("expected ',' or ']' in array");
    }
  }

  ConfigValue string() {
    const std::size_t end = text_.find('"', pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return ConfigValue{std::move(s)};
  }

  ConfigValue number() {
    double x = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{}) fail("expected a number, string, boolean or array");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return ConfigValue{x};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::string key_;
  int line_;
};

inline std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

struct Entry {
  std::string key;
  int line;
  ConfigValue value;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(key, line, what); }

  [[nodiscard]] double number() const {
    if (const auto* x = std::get_if<double>(&value.data)) return *x;
    fail("expected a number");
  }
  [[nodiscard]] double non_negative() const {
    const double x = number();
    if (!(x >= 0.0)) fail("must be non-negative");
    return x;
  }
  [[nodiscard]] Index count() const {
    const double x = number();
    if (x < 0.0 || x != static_cast<double>(static_cast<std::int64_t>(x))) {
      fail("expected a non-negative integer");
    }
    return static_cast<Index>(x);
  }
  [[nodiscard]] const std::string& string() const {
    if (const auto* s = std::get_if<std::string>(&value.data)) return *s;
    fail("expected a quoted string");
  }
  [[nodiscard]] bool boolean() const {
    if (const auto* b = std::get_if<bool>(&value.data)) return *b;
    fail("expected true or false");
  }
  [[nodiscard]] const ConfigValue::Array& array() const {
    if (const auto* a = std::get_if<ConfigValue::Array>(&value.data)) return *a;
    fail("expected an array");
  }
};

/// Seeds are 64-bit integers and need exact parsing, not a double.
inline std::uint64_t parse_seed_text(const std::string& raw, const std::string& key, int line) {
  std::uint64_t seed = 0;
  const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), seed);
  if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size()) {
    throw ConfigError(key, line, "expected a non-negative 64-bit integer");
  }
  return seed;
}

}  // namespace detail

/// Parses a configuration; defaults are the reference scenario.
inline ParsedConfig parse_config(std::istream& in) {
  ParsedConfig out;
  ScenarioConfig& c = out.scenario;
  std::optional<detail::Entry> rows_entry;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(detail::trim(line), line_no, "expected 'key = value'");
    }
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    std::string text = detail::trim(std::string_view(line).substr(eq + 1));
    const int start_line = line_no;
    while (detail::bracket_balance(text) > 0 && std::getline(in, raw)) {
      ++line_no;
      text += '\n' + detail::trim(detail::strip_comment(raw));
    }
    if (key.empty()) throw ConfigError(key, start_line, "missing key name");

    if (key == "seed") {
      c.master_seed = detail::parse_seed_text(text, key, start_line);
      out.seed_set = true;
      continue;
    }
    const detail::Entry e{key, start_line, detail::ValueParser(text, key, start_line).parse()};

    if (key == "embedding") {
      const auto kind = parse_embedding_kind(e.string());
      if (!kind) e.fail("expected reference, cohesion, absorption or explicit");
      c.embedding = *kind;
    } else if (key == "group_size") {
      c.group_size = e.count();
    } else if (key == "n_independent") {
      c.n_independent = e.count();
    } else if (key == "alpha") {
      c.alpha = e.number();
      if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) e.fail("must lie in [0, 1]");
    } else if (key == "beta") {
      c.beta = e.number();
      if (!(c.beta >= 0.0 && c.beta <= 1.0)) e.fail("must lie in [0, 1]");
    } else if (key == "embedding_rows") {
      rows_entry = e;
    } else if (key == "sigma_d") {
      c.noise.sigma_d = e.non_negative();
    } else if (key == "sigma_f") {
      c.noise.sigma_f = e.non_negative();
    } else if (key == "m") {
      c.m = e.count();
      if (c.m < 2) e.fail("need at least 2 candidates");
    } else if (key == "m_train") {
      c.m_train = e.count();
    } else if (key == "n_trials" || key == "trials") {
      c.n_trials = e.count();
      if (c.n_trials < 1) e.fail("need at least 1 trial");
    } else if (key == "share_training") {
      c.share_training = e.boolean();
    } else if (key == "sa_agent") {
      c.single_agent_index = e.count();
    } else if (key == "rules") {
      c.rules.clear();
      for (const ConfigValue& v : e.array()) {
        const auto* name = std::get_if<std::string>(&v.data);
        if (name == nullptr) e.fail("rule names must be quoted strings");
        const auto rule = parse_rule(*name);
        if (!rule) e.fail("unknown rule '" + *name + "'");
        c.rules.push_back(*rule);
      }
      if (c.rules.empty()) e.fail("at least one rule is required");
    } else if (key == "sweep_parameter") {
      try {
        (void)parse_sweep_parameter(e.string());
      } catch (const UsageError& err) {
        e.fail(err.what());
      }
      out.sweep_parameter = e.string();
    } else if (key == "sweep_values") {
      out.sweep_values.clear();
      for (const ConfigValue& v : e.array()) {
        const auto* x = std::get_if<double>(&v.data);
        if (x == nullptr) e.fail("sweep values must be numbers");
        out.sweep_values.push_back(*x);
      }
    } else {
      e.fail("unknown key");
    }
  }

  if (c.embedding == EmbeddingKind::kExplicit) {
    if (!rows_entry) throw ConfigError("embedding_rows", line_no, "required for explicit embedding");
    const auto& rows = rows_entry->array();
    if (rows.empty()) rows_entry->fail("need at least one row");
    Index width = -1;
    Matrix m;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto* row = std::get_if<ConfigValue::Array>(&rows[i].data);
      if (row == nullptr) rows_entry->fail("row " + std::to_string(i) + " is not an array");
      if (width < 0) {
        width = static_cast<Index>(row->size());
        if (width == 0) rows_entry->fail("row 0 is empty");
        m.resize(static_cast<Index>(rows.size()), width);
      }
      if (static_cast<Index>(row->size()) != width) {
        rows_entry->fail("row " + std::to_string(i) + " has a different length");
      }
      for (std::size_t l = 0; l < row->size(); ++l) {
        const auto* x = std::get_if<double>(&(*row)[l].data);
        if (x == nullptr) rows_entry->fail("row " + std::to_string(i) + " has a non-number");
        m(static_cast<Index>(i), static_cast<Index>(l)) = *x;
      }
    }
    if (const auto bad = EmbeddingMatrix::first_invalid_row(m)) {
      rows_entry->fail("row " + std::to_string(*bad) +
                       " must be non-zero with unit Euclidean norm (tolerance 1e-9)");
    }
    c.explicit_rows = std::move(m);
  } else if (rows_entry) {
    rows_entry->fail("only allowed with embedding = \"explicit\"");
  }

  try {
    c.validate();
  } catch (const UsageError& err) {
    throw ConfigError("(scenario)", line_no, err.what());
  }
  return out;
}

inline ParsedConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace corrvote

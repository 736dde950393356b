#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "mca/rule.hpp"

namespace mca {

namespace {

LocalRule tabulate(int states, int radius, const std::function<int(std::span<const State>)>& f) {
  auto size = LocalRule::table_size(states, radius, SIZE_MAX);
  LocalRule shape(states, radius, std::vector<State>(*size, 0));
  std::vector<State> table(*size);
  for (std::size_t index = 0; index < *size; ++index) {
    std::vector<State> word = shape.neighborhood_of(index);
    table[index] = static_cast<State>(f(word));
  }
  return LocalRule(states, radius, std::move(table));
}

int galperin3_local(int a, int b, int c) {
  if (a == 0 && b <= 1 && c <= 1) return 0;
  if (b == 2 && c <= 1) return 1;
  if (c == 2 && a + b >= 2) return 2;
  return b;
}

LocalRule galperin3() {
  return tabulate(3, 1, [](std::span<const State> x) { return galperin3_local(x[0], x[1], x[2]); });
}

LocalRule decrement(int m) {
  if (m < 1) throw RuleError("decrement needs m >= 1");
  return tabulate(m + 1, 1, [](std::span<const State> x) {
    const int b = x[1], c = x[2];
    return (b > 0 && c == 0) ? b - 1 : b;
  });
}

LocalRule min2() {
  return tabulate(2, 1, [](std::span<const State> x) { return std::min(x[1], x[2]); });
}

// Radius-2 ternary rule that erodes islands in both directions. The third
// case is the mirror image of the second under x -> 2 - x, which makes the
// rule monotone and conjugate to itself by reflect-and-invert.
LocalRule bidir3() {
  return tabulate(3, 2, [](std::span<const State> x) {
    const int a = x[0], b = x[1], c = x[2], d = x[3], e = x[4];
    if (std::max({a, b, c, d}) <= 1 && e == 0) return 0;
    if (c == 0 && std::min(d, e) >= 1) return 1;
    if (c == 2 && std::max(a, b) <= 1) return 1;
    if (a == 2 && std::min({b, c, d, e}) >= 1) return 2;
    return c;
  });
}

// galperin3 extended by a state 3 that erodes at linear speed.
LocalRule wrapped4() {
  return tabulate(4, 1, [](std::span<const State> x) {
    auto bar = [](int s) { return std::min(s, 2); };
    const int a = x[0], b = x[1], c = x[2];
    if (b <= 2) return galperin3_local(bar(a), bar(b), bar(c));
    if (a == 3 && b == 3 && c == 3) return 3;
    return bar(b);
  });
}

struct Token {
  std::string text;
  int line;
  int column;
};

std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) {
        tokens.push_back({std::string(line.substr(start, i - start)), line_no,
                          static_cast<int>(start) + 1});
      }
    }
    lines.push_back(std::move(tokens));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

long parse_number(const Token& tok, const char* what) {
  if (tok.text.empty() || !std::all_of(tok.text.begin(), tok.text.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }) || tok.text.size() > 9) {
    throw RuleParseError(tok.line, tok.column, std::string("expected ") + what + ", got '" +
                                                   tok.text + "'");
  }
  return std::stol(tok.text);
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"galperin3", "decrement", "min2", "bidir3", "wrapped4"};
}

LocalRule builtin_rule(const std::string& name, std::optional<int> param) {
  if (name == "galperin3") return galperin3();
  if (name == "decrement") return decrement(param.value_or(3));
  if (name == "min2") return min2();
  if (name == "bidir3") return bidir3();
  if (name == "wrapped4") return wrapped4();
  throw RuleError("unknown builtin '" + name + "'");
}

LocalRule parse_rule(std::string_view text) {
  auto lines = tokenize(text);
  std::size_t li = 0;
  auto next_nonempty = [&]() -> const std::vector<Token>* {
    while (li < lines.size() && lines[li].empty()) ++li;
    return li < lines.size() ? &lines[li++] : nullptr;
  };
  const auto* header = next_nonempty();
  if (!header || header->size() != 2 || (*header)[0].text != "ca-rule" ||
      (*header)[1].text != "v1") {
    const int line = header ? (*header)[0].line : 1;
    throw RuleParseError(line, 1, "missing header 'ca-rule v1'");
  }
  std::optional<long> states, radius;
  std::optional<LocalRule> builtin;
  std::vector<State> table;
  bool have_table = false;
  int last_line = header->front().line;
  while (const auto* tokens = next_nonempty()) {
    const Token& key = tokens->front();
    last_line = key.line;
    if (key.text == "states" || key.text == "radius") {
      if (tokens->size() != 2) throw RuleParseError(key.line, key.column, key.text + " takes one value");
      if (have_table || builtin) {
        throw RuleParseError(key.line, key.column, key.text + " must precede the table");
      }
      long value = parse_number((*tokens)[1], key.text == "states" ? "state count" : "radius");
      (key.text == "states" ? states : radius) = value;
    } else if (key.text == "table") {
      if (have_table || builtin) throw RuleParseError(key.line, key.column, "duplicate rule body");
      if (!states || !radius) {
        throw RuleParseError(key.line, key.column, "table requires preceding states and radius");
      }
      if (*states < 2 || *states > 256) {
        throw RuleParseError(key.line, key.column, "state count must be in [2, 256]");
      }
      have_table = true;
      auto expected = LocalRule::table_size(static_cast<int>(*states), static_cast<int>(*radius));
      if (!expected) throw RuleParseError(key.line, key.column, "table size exceeds cap");
      auto take = [&](const Token& tok) {
        long value = parse_number(tok, "table entry");
        if (value >= *states) {
          throw RuleParseError(tok.line, tok.column,
                               "table entry " + tok.text + " out of range [0," +
                                   std::to_string(*states - 1) + "]");
        }
        if (table.size() == *expected) {
          throw RuleParseError(tok.line, tok.column,
                               "table has more than " + std::to_string(*expected) + " entries");
        }
        table.push_back(static_cast<State>(value));
      };
      for (std::size_t k = 1; k < tokens->size(); ++k) take((*tokens)[k]);
      // continuation lines hold further entries
      while (li < lines.size()) {
        if (lines[li].empty()) {
          ++li;
          continue;
        }
        for (const Token& tok : lines[li]) take(tok);
        last_line = lines[li].front().line;
        ++li;
      }
      if (table.size() != *expected) {
        throw RuleParseError(last_line, 1,
                             "table has " + std::to_string(table.size()) + " entries, expected " +
                                 std::to_string(*expected));
      }
    } else if (key.text == "builtin") {
      if (have_table || builtin) throw RuleParseError(key.line, key.column, "duplicate rule body");
      if (tokens->size() < 2 || tokens->size() > 3) {
        throw RuleParseError(key.line, key.column, "usage: builtin <name> [param]");
      }
      std::optional<int> param;
      if (tokens->size() == 3) param = static_cast<int>(parse_number((*tokens)[2], "parameter"));
      try {
        builtin = builtin_rule((*tokens)[1].text, param);
      } catch (const RuleError& e) {
        throw RuleParseError((*tokens)[1].line, (*tokens)[1].column, e.what());
      }
      if ((states && *states != builtin->state_count()) ||
          (radius && *radius != builtin->radius())) {
        throw RuleParseError(key.line, key.column, "states/radius disagree with builtin");
      }
    } else {
      throw RuleParseError(key.line, key.column, "unknown directive '" + key.text + "'");
    }
  }
  if (builtin) return *builtin;
  if (!have_table) throw RuleParseError(last_line, 1, "missing 'table' or 'builtin' line");
  return LocalRule(static_cast<int>(*states), static_cast<int>(*radius), std::move(table));
}

LocalRule load_rule(const std::string& reference) {
  const std::string prefix = "builtin:";
  if (reference.rfind(prefix, 0) == 0) {
    std::string rest = reference.substr(prefix.size());
    std::optional<int> param;
    if (auto colon = rest.find(':'); colon != std::string::npos) {
      try {
        param = std::stoi(rest.substr(colon + 1));
      } catch (const std::logic_error&) {
        throw RuleError("bad builtin parameter in '" + reference + "'");
      }
      rest = rest.substr(0, colon);
    }
    return builtin_rule(rest, param);
  }
  std::ifstream in(reference);
  if (!in) throw RuleError("cannot open rule file '" + reference + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_rule(buffer.str());
}

std::string format_rule(const LocalRule& rule) {
  std::ostringstream out;
  out << "ca-rule v1\nstates " << rule.state_count() << "\nradius " << rule.radius() << "\ntable";
  const std::size_t per_line = static_cast<std::size_t>(rule.state_count());
  for (std::size_t i = 0; i < rule.table().size(); ++i) {
    out << (i % (per_line * per_line) == 0 ? "\n" : " ") << int(rule.table()[i]);
  }
  out << "\n";
  return out.str();
}

}  // namespace mca

#include <cctype>
#include <fstream>
#include <sstream>

#include "meda/algsolve.hpp"
#include "meda/error.hpp"
#include "meda/parser.hpp"

namespace meda {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || std::isalpha(static_cast<unsigned char>(s[0])) == 0) return false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_') return false;
  }
  return true;
}

}  // namespace

CandidateFile parse_candidate_text(const std::string& text, const std::string& origin) {
  CandidateFile file;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& msg) { throw FileFormatError(origin, line, msg); };
  auto expr = [&](const std::string& s) -> Expr {
    try {
      return parse_expr_free(s);
    } catch (const ParseError& err) {
      fail(err.what());
    }
    return {};
  };
  auto name = [&](const std::string& s) {
    std::string n = trim(s);
    if (!is_identifier(n)) fail("invalid identifier '" + n + "'");
    return n;
  };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;

    const auto colon = s.find(':');
    const auto eq = s.find('=');
    if (colon != std::string::npos && (eq == std::string::npos || colon < eq)) {
      const std::string key = trim(s.substr(0, colon));
      const std::string value = trim(s.substr(colon + 1));
      if (key == "source") {
        file.source = value;
      } else if (key == "problem") {
        file.problem = value;
      } else if (key == "arbitrary") {
        for (const auto& part : split(value, ',')) {
          std::istringstream ws(part);
          for (std::string w; ws >> w;) file.candidate.arbitrary.insert(name(w));
        }
      } else if (key == "branch") {
        for (const auto& part : split(value, ',')) file.branches.push_back(part);
      } else if (key == "transform") {
        expr(value);
        file.transform = value;
      } else if (key == "instantiate") {
        NumericBindings values;
        for (const auto& part : split(value, ',')) {
          const auto e = part.find('=');
          if (e == std::string::npos) fail("expected 'name=value' in instantiate");
          try {
            values[name(part.substr(0, e))] = eval_complex(expr(part.substr(e + 1)), {});
          } catch (const UnboundSymbol& err) {
            fail(err.what());
          }
        }
        file.instantiations.push_back(values);
      } else if (key == "printed_u") {
        expr(value);
        file.printed_u = value;
      } else if (key == "printed_v") {
        expr(value);
        file.printed_v = value;
      } else if (key == "printed_transformed") {
        expr(value);
        file.printed_transformed = value;
      } else if (key == "expected") {
        if (value != "pass" && value != "fail") fail("expected must be 'pass' or 'fail'");
        file.expected = value;
      } else if (key == "note") {
        file.notes.push_back(value);
      } else {
        fail("unknown directive '" + key + "'");
      }
      continue;
    }
    if (s.rfind("abbrev", 0) == 0 && s.size() > 6 && std::isspace(static_cast<unsigned char>(s[6])) != 0) {
      const auto e = s.find('=');
      if (e == std::string::npos) fail("expected 'abbrev NAME = expr'");
      file.candidate.abbreviations.emplace_back(name(s.substr(6, e - 6)), expr(s.substr(e + 1)));
      continue;
    }
    if (eq == std::string::npos) fail("expected 'name = expr' or a directive");
    const std::string key = name(s.substr(0, eq));
    if (file.candidate.bindings.contains(key)) fail("duplicate binding for '" + key + "'");
    file.candidate.bindings[key] = expr(s.substr(eq + 1));
  }
  file.candidate.source = file.source;
  if (file.candidate.bindings.empty()) throw FileFormatError(origin, line, "no bindings");
  return file;
}

CandidateFile parse_candidate_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FileFormatError(file.string(), 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_candidate_text(buf.str(), file.string());
}

}  // namespace meda

#include "planlearn/trace.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "planlearn/text.hpp"

namespace planlearn {

std::string to_string(const GroundAtom& a) {
  std::string s = "(" + a.name;
  for (const auto& arg : a.args) s += " " + arg;
  s += ")";
  return s;
}

std::string to_string(const ActionInstance& a) {
  std::string s = "[" + std::to_string(a.start) + "][" + std::to_string(a.end) + "] (" + a.name;
  for (const auto& arg : a.args) s += " " + arg;
  s += ")";
  return s;
}

namespace {

// Cursor over one line, tracking column for error messages.
class LineCursor {
 public:
  LineCursor(const std::string& line, int line_no) : line_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw TraceError(TraceError::Kind::Syntax, msg, line_no_, static_cast<int>(pos_) + 1);
  }

  void skip_spaces() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_spaces();
    return pos_ >= line_.size();
  }

  char peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }

  void expect(char c) {
    if (pos_ >= line_.size() || line_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool try_consume(const std::string& word) {
    if (line_.compare(pos_, word.size(), word) == 0) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  int parse_int() {
    skip_spaces();
    size_t start = pos_;
    if (pos_ < line_.size() && (line_[pos_] == '-' || line_[pos_] == '+')) ++pos_;
    while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    int value = 0;
    auto r = std::from_chars(line_.data() + start, line_.data() + pos_, value);
    if (r.ec != std::errc{} || r.ptr != line_.data() + pos_ || pos_ == start)
      fail("expected integer");
    return value;
  }

  double parse_number() {
    skip_spaces();
    size_t start = pos_;
    auto ok = [&](char c) {
      return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
             c == '.' || c == 'e' || c == 'E';
    };
    while (pos_ < line_.size() && ok(line_[pos_])) ++pos_;
    double value = 0;
    auto r = std::from_chars(line_.data() + start, line_.data() + pos_, value);
    if (r.ec != std::errc{} || r.ptr != line_.data() + pos_ || pos_ == start)
      fail("expected number");
    return value;
  }

  std::string parse_ident() {
    skip_spaces();
    size_t start = pos_;
    auto ok = [&](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '?';
    };
    while (pos_ < line_.size() && ok(line_[pos_])) ++pos_;
    if (pos_ == start) fail("expected identifier");
    return line_.substr(start, pos_ - start);
  }

  // "(name a b)" -> GroundAtom
  GroundAtom parse_atom() {
    skip_spaces();
    expect('(');
    GroundAtom atom;
    atom.name = parse_ident();
    skip_spaces();
    while (peek() != ')' && peek() != '\0') {
      atom.args.push_back(parse_ident());
      skip_spaces();
    }
    expect(')');
    return atom;
  }

 private:
  const std::string& line_;
  int line_no_;
  size_t pos_ = 0;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

bool blank(const std::string& s) {
  for (char c : s)
    if (c != ' ' && c != '\t') return false;
  return true;
}

}  // namespace

PlanTrace parse_plan_trace(const std::string& text) {
  PlanTrace trace;
  auto lines = split_lines(text);

  size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size() && blank(lines[i])) ++i;
  };

  skip_blank();
  if (i >= lines.size() || lines[i] != "#Actions")
    throw TraceError(TraceError::Kind::Syntax, "expected '#Actions' section",
                     static_cast<int>(i) + 1, 1);
  ++i;

  while (i < lines.size()) {
    if (blank(lines[i])) {
      ++i;
      continue;
    }
    if (lines[i] == "#States") break;
    LineCursor cur(lines[i], static_cast<int>(i) + 1);
    ActionInstance act;
    cur.expect('[');
    act.start = cur.parse_int();
    cur.expect(']');
    cur.expect('[');
    act.end = cur.parse_int();
    cur.expect(']');
    cur.skip_spaces();
    GroundAtom head = cur.parse_atom();
    act.name = head.name;
    act.args = head.args;
    if (!cur.at_end()) cur.fail("trailing content after action");
    trace.actions.push_back(std::move(act));
    ++i;
  }

  if (i >= lines.size() || lines[i] != "#States")
    throw TraceError(TraceError::Kind::Syntax, "expected '#States' section",
                     static_cast<int>(i) + 1, 1);
  ++i;

  while (i < lines.size()) {
    if (blank(lines[i])) {
      ++i;
      continue;
    }
    int line_no = static_cast<int>(i) + 1;
    LineCursor cur(lines[i], line_no);
    State state;
    cur.expect('[');
    state.index = cur.parse_int();
    cur.expect(']');
    while (!cur.at_end()) {
      cur.skip_spaces();
      cur.expect('(');
      if (cur.try_consume("not")) {
        GroundAtom atom = cur.parse_atom();
        cur.skip_spaces();
        cur.expect(')');
        if (state.literals.count(atom))
          throw TraceError(TraceError::Kind::Duplicate,
                           "duplicate literal " + to_string(atom), line_no, 1);
        state.literals.emplace(std::move(atom), false);
      } else if (cur.try_consume("=")) {
        GroundAtom atom = cur.parse_atom();
        double value = cur.parse_number();
        cur.skip_spaces();
        cur.expect(')');
        if (state.fluents.count(atom))
          throw TraceError(TraceError::Kind::Duplicate,
                           "duplicate fluent " + to_string(atom), line_no, 1);
        state.fluents.emplace(std::move(atom), value);
      } else {
        GroundAtom atom;
        atom.name = cur.parse_ident();
        cur.skip_spaces();
        while (cur.peek() != ')' && cur.peek() != '\0') {
          atom.args.push_back(cur.parse_ident());
          cur.skip_spaces();
        }
        cur.expect(')');
        if (state.literals.count(atom))
          throw TraceError(TraceError::Kind::Duplicate,
                           "duplicate literal " + to_string(atom), line_no, 1);
        state.literals.emplace(std::move(atom), true);
      }
    }
    trace.states.push_back(std::move(state));
    ++i;
  }

  // Trace-level invariants.
  if (trace.states.size() != trace.actions.size() + 1)
    throw TraceError(TraceError::Kind::IndexGap,
                     "index gap: " + std::to_string(trace.states.size()) + " states for " +
                         std::to_string(trace.actions.size()) + " actions");
  for (size_t s = 0; s < trace.states.size(); ++s)
    if (trace.states[s].index != static_cast<int>(s))
      throw TraceError(TraceError::Kind::IndexGap,
                       "index gap: state " + std::to_string(s) + " labelled " +
                           std::to_string(trace.states[s].index));
  for (size_t a = 0; a < trace.actions.size(); ++a) {
    const auto& act = trace.actions[a];
    if (act.start != static_cast<int>(a) || act.end != act.start + 1)
      throw TraceError(TraceError::Kind::IndexGap,
                       "index gap: action " + std::to_string(a) + " spans [" +
                           std::to_string(act.start) + "][" + std::to_string(act.end) + "]");
  }
  return trace;
}

std::string serialize_plan_trace(const PlanTrace& trace) {
  std::ostringstream out;
  out << "#Actions\n";
  for (const auto& act : trace.actions) out << to_string(act) << "\n";
  out << "\n#States\n";
  for (const auto& state : trace.states) {
    out << "[" << state.index << "]";
    for (const auto& [atom, truth] : state.literals) {
      if (truth)
        out << " " << to_string(atom);
      else
        out << " (not " << to_string(atom) << ")";
    }
    for (const auto& [atom, value] : state.fluents)
      out << " (= " << to_string(atom) << " " << format_number(value) << ")";
    out << "\n";
  }
  return out.str();
}

}  // namespace planlearn

#include <sstream>

#include "relboost/error.hpp"
#include "relboost/induce.hpp"
#include "relboost/text_format.hpp"

namespace relboost::rrt {

std::vector<ModeDeclaration> parse_modes(std::string_view text, const logic::Schema& schema) {
  std::vector<ModeDeclaration> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = logic::strip_comment(raw);
    if (line.empty()) continue;
    if (!line.starts_with("mode:")) throw ParseError(line_no, "expected 'mode:'");
    line = logic::trim(line.substr(5));
    if (line.empty() || line.back() != '.') throw ParseError(line_no, "missing terminating '.'");
    line = logic::trim(line.substr(0, line.size() - 1));

    const std::size_t open = line.find('(');
    if (open == std::string_view::npos || line.back() != ')') throw ParseError(line_no, "expected name(args)");
    const std::string name(logic::trim(line.substr(0, open)));
    std::vector<std::string_view> args;
    std::string_view inner = line.substr(open + 1, line.size() - open - 2);
    for (std::size_t start = 0;;) {
      const std::size_t comma = inner.find(',', start);
      args.push_back(logic::trim(inner.substr(start, comma == std::string_view::npos ? inner.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    const logic::PredicateSignature* signature = schema.find(name, args.size());
    if (signature == nullptr) {
      throw ParseError(line_no, "unknown predicate " + name + "/" + std::to_string(args.size()));
    }
    ModeDeclaration decl{*signature, {}};
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string_view arg = args[i];
      if (arg.size() < 2) throw ParseError(line_no, "bad mode argument '" + std::string(arg) + "'");
      ArgMode mode;
      switch (arg.front()) {
        case '+': mode = ArgMode::Input; break;
        case '-': mode = ArgMode::Output; break;
        case '#': mode = ArgMode::Constant; break;
        default: throw ParseError(line_no, "mode must start with +, - or #: '" + std::string(arg) + "'");
      }
      const auto type = logic::parse_arg_type(logic::trim(arg.substr(1)));
      if (!type || *type != signature->arg_types[i]) {
        throw ParseError(line_no, "type '" + std::string(arg.substr(1)) + "' does not match schema for " + name);
      }
      decl.modes.push_back(mode);
    }
    out.push_back(std::move(decl));
  }
  return out;
}

std::string render_modes(std::span<const ModeDeclaration> modes) {
  std::string out;
  for (const auto& decl : modes) {
    out += "mode: " + decl.predicate.name.str() + "(";
    for (std::size_t i = 0; i < decl.modes.size(); ++i) {
      if (i > 0) out += ", ";
      switch (decl.modes[i]) {
        case ArgMode::Input: out += "+"; break;
        case ArgMode::Output: out += "-"; break;
        case ArgMode::Constant: out += "#"; break;
      }
      out += logic::to_string(decl.predicate.arg_types[i]);
    }
    out += ").\n";
  }
  return out;
}

}  // namespace relboost::rrt

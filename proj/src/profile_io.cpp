#include <charconv>
#include <fmt/format.h>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "radmax/profiles.hpp"

namespace radmax {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, int line_no) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(
        fmt::format("line {}: '{}' is not a number", line_no, tok));
  }
  return v;
}

BuiltinKind kind_from_name(std::string_view name) {
  if (name == "ball-indicator") return BuiltinKind::BallIndicator;
  if (name == "psi") return BuiltinKind::Psi;
  if (name == "power") return BuiltinKind::TruncatedPower;
  if (name == "exponential" || name == "exp") return BuiltinKind::Exponential;
  throw std::invalid_argument(fmt::format("unknown builtin profile '{}'", name));
}

}  // namespace

RadialProfile parse_profile(std::istream& in) {
  std::string header;
  std::vector<double> radii;
  std::vector<double> values;
  BuiltinProfile builtin;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    if (header.empty()) {
      header = tokens[0];
      if (header == "builtin") {
        if (tokens.size() < 2 || tokens.size() > 3) {
          throw std::invalid_argument(
              fmt::format("line {}: expected 'builtin <name> [gamma]'", line_no));
        }
        builtin.kind = kind_from_name(tokens[1]);
        if (tokens.size() == 3) builtin.gamma = parse_number(tokens[2], line_no);
      } else if (header != "piecewise-constant" && header != "piecewise-linear") {
        throw std::invalid_argument(
            fmt::format("line {}: unknown representation '{}'", line_no, header));
      } else if (tokens.size() != 1) {
        throw std::invalid_argument(
            fmt::format("line {}: header takes no arguments", line_no));
      }
      continue;
    }
    if (tokens.size() != 2) {
      throw std::invalid_argument(
          fmt::format("line {}: expected two fields, got {}", line_no, tokens.size()));
    }
    if (header == "builtin") {
      const double v = parse_number(tokens[1], line_no);
      if (tokens[0] == "height") {
        builtin.height = v;
      } else if (tokens[0] == "length") {
        builtin.length = v;
      } else {
        throw std::invalid_argument(
            fmt::format("line {}: unknown builtin field '{}'", line_no, tokens[0]));
      }
      continue;
    }
    radii.push_back(parse_number(tokens[0], line_no));
    values.push_back(parse_number(tokens[1], line_no));
  }
  if (header.empty()) throw std::invalid_argument("profile file has no header");
  if (header == "builtin") return RadialProfile::builtin(builtin);
  if (header == "piecewise-constant") {
    return RadialProfile::piecewise_constant(std::move(radii), std::move(values));
  }
  return RadialProfile::piecewise_linear(std::move(radii), std::move(values));
}

RadialProfile parse_profile_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_profile(in);
}

std::string format_profile(const RadialProfile& profile) {
  std::string out;
  const auto& rep = profile.representation();
  if (const auto* pc = std::get_if<PiecewiseConstant>(&rep)) {
    out = "piecewise-constant\n";
    for (std::size_t k = 0; k < pc->breaks.size(); ++k) {
      out += fmt::format("{:.17g} {:.17g}\n", pc->breaks[k], pc->values[k]);
    }
  } else if (const auto* pl = std::get_if<PiecewiseLinear>(&rep)) {
    out = "piecewise-linear\n";
    for (std::size_t k = 0; k < pl->radii.size(); ++k) {
      out += fmt::format("{:.17g} {:.17g}\n", pl->radii[k], pl->values[k]);
    }
  } else {
    const auto& b = std::get<BuiltinProfile>(rep);
    out = fmt::format("builtin {}", builtin_name(b.kind));
    if (b.kind == BuiltinKind::TruncatedPower) out += fmt::format(" {:.17g}", b.gamma);
    out += '\n';
    if (b.height != 1.0) out += fmt::format("height {:.17g}\n", b.height);
    if (b.length != 1.0) out += fmt::format("length {:.17g}\n", b.length);
  }
  return out;
}

RadialProfile builtin_profile_by_name(std::string_view name) {
  if (name.starts_with("power:")) {
    const std::string arg(name.substr(6));
    return RadialProfile::truncated_power(parse_number(arg, 0));
  }
  BuiltinProfile b;
  b.kind = kind_from_name(name);
  if (b.kind == BuiltinKind::TruncatedPower) {
    throw std::invalid_argument("power profile needs an exponent: power:<gamma>");
  }
  return RadialProfile::builtin(b);
}

}  // namespace radmax

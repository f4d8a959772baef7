#include "xtal/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace xtal {

std::string format_real(Real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump(const nlohmann::json& j, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays stay on one line.
      bool flat = j.size() <= 9;
      for (const auto& e : j) flat = flat && (e.is_number() || e.is_null());
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? (indent < 0 ? "," : ", ") : ",";
        if (!flat) newline(depth + 1);
        dump(j[i], indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_real(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

Configuration read_xyz(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("xyz: empty input");
  std::size_t n = 0;
  try {
    n = static_cast<std::size_t>(std::stoull(line));
  } catch (const std::exception&) {
    throw DomainError("xyz: first line must hold the particle count");
  }
  std::string comment;
  std::getline(in, comment);
  Configuration c;
  const auto pos = comment.find("Lattice=\"");
  if (pos != std::string::npos) {
    const auto end = comment.find('"', pos + 9);
    if (end == std::string::npos) throw DomainError("xyz: unterminated Lattice entry");
    std::istringstream ls(comment.substr(pos + 9, end - pos - 9));
    Mat3 cell;
    for (int col = 0; col < 3; ++col)
      for (int row = 0; row < 3; ++row)
        if (!(ls >> cell(row, col))) throw DomainError("xyz: Lattice needs nine numbers");
    if (std::abs(cell.determinant()) < 1e-12) throw DomainError("xyz: singular Lattice");
    c.cell = cell;
  }
  c.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw DomainError("xyz: expected " + std::to_string(n) + " particle lines");
    std::istringstream ls(line);
    std::string species;
    Vec3 p;
    if (!(ls >> species >> p[0] >> p[1] >> p[2])) throw DomainError("xyz: malformed particle line " + line);
    if (!p.allFinite()) throw DomainError("xyz: non-finite coordinate");
    c.positions.push_back(p);
  }
  return c;
}

Configuration read_xyz_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_xyz(in);
}

void write_xyz(std::ostream& out, const Configuration& config, const std::string& comment,
               const std::vector<XyzColumn>& extra) {
  out << config.size() << '\n';
  std::string head;
  if (config.periodic()) {
    head += "Lattice=\"";
    for (int col = 0; col < 3; ++col)
      for (int row = 0; row < 3; ++row) head += (col || row ? " " : "") + format_real((*config.cell)(row, col));
    head += "\" ";
  }
  head += "Properties=species:S:1:pos:R:3";
  for (const auto& e : extra) head += ":" + e.name + ":S:1";
  if (!comment.empty()) head += " " + comment;
  out << head << '\n';
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Vec3& p = config.positions[i];
    out << "X " << format_real(p[0]) << ' ' << format_real(p[1]) << ' ' << format_real(p[2]);
    for (const auto& e : extra) out << ' ' << e.values.at(i);
    out << '\n';
  }
}

std::string xyz_string(const Configuration& config, const std::string& comment, const std::vector<XyzColumn>& extra) {
  std::ostringstream s;
  write_xyz(s, config, comment, extra);
  return s.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& parameters,
                             const nlohmann::json& potential, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return {{"command", command},
          {"parameters", parameters},
          {"potential_hash", potential.is_null() ? nlohmann::json(nullptr) : nlohmann::json(hex64(fnv1a(dump_json(potential))))},
          {"version", kVersion},
          {"seed", seed},
          {"timestamp", ts.str()}};
}

void write_manifest(const std::string& output_path, const nlohmann::json& manifest) {
  write_text_file(output_path + ".manifest.json", dump_json(manifest) + "\n");
}

}  // namespace xtal

#pragma once

#include "xtal/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace xtal {

/// %.17g; non-finite values print as "inf", "-inf" or "nan".
std::string format_real(Real x);

/// JSON text with every floating-point number at 17 significant digits.
/// Non-finite numbers become null. Object keys keep nlohmann's sorted order.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Extended XYZ. A Lattice="..." comment entry (cell columns) makes the
/// configuration periodic.
Configuration read_xyz(std::istream& in);
Configuration read_xyz_file(const std::string& path);

struct XyzColumn {
  std::string name;
  std::vector<std::string> values;
};

void write_xyz(std::ostream& out, const Configuration& config, const std::string& comment = "",
               const std::vector<XyzColumn>& extra = {});
std::string xyz_string(const Configuration& config, const std::string& comment = "",
                       const std::vector<XyzColumn>& extra = {});

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t x);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Manifest written beside an output file as <path>.manifest.json.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& parameters,
                             const nlohmann::json& potential, std::uint64_t seed);
void write_manifest(const std::string& output_path, const nlohmann::json& manifest);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace xtal

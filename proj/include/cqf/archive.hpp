// archive.hpp: versioned JSON serialization of equation sets

#pragma once

#include <string>
#include <string_view>

#include "cqf/meanfield.hpp"

namespace cqf {

inline constexpr int kArchiveVersion = 1;

std::string serialize(const EquationSet& eqs);
/// Throws IoError on malformed or unsupported input.
EquationSet deserialize(std::string_view text);

void save_archive(const EquationSet& eqs, const std::string& path);
EquationSet load_archive(const std::string& path);

} // namespace cqf

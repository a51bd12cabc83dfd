#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace pickbench {

std::string read_text(const std::filesystem::path& path);

/// Writes every file to a temporary sibling first and renames them into place
/// only once all writes succeeded. Throws IoFailure.
void write_files(const std::vector<std::pair<std::filesystem::path, std::string>>& files);

}  // namespace pickbench

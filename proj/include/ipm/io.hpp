#pragma once

#include <string>

namespace ipm {

// Writes `content` to `path` via a temp file in the same directory followed
// by rename(), so readers never observe a partially written file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace ipm

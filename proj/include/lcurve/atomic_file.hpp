#pragma once

#include <string>
#include <string_view>

namespace lcurve {

/// Writes to a temporary sibling of `path` and renames it into place, so the
/// destination either keeps its old contents or holds all of `contents`.
/// Throws InputError when the file cannot be written.
void write_file_atomic(const std::string& path, std::string_view contents);

/// Whole file as bytes. Throws InputError when it cannot be read.
std::string read_file(const std::string& path);

}  // namespace lcurve

#pragma once

// Whole-file read/write holding an exclusive advisory lock on the path for the
// duration of the call.

#include <string>

namespace gridident::detail {

std::string read_file_locked(const std::string& path);
void write_file_locked(const std::string& path, const std::string& contents);

}  // namespace gridident::detail

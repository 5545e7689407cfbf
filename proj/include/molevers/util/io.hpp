//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_UTIL_IO_HPP_
#define MOLEVERS_UTIL_IO_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace molevers {

class IoError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

/// printf-style "%.6g" rendering used by every report file.
std::string format_g6(double value);

}  // namespace molevers

#endif  // MOLEVERS_UTIL_IO_HPP_

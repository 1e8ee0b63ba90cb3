/* Copyright 2026 CDM Pipeline Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef CDM_SRC_IO_UTIL_HPP_
#define CDM_SRC_IO_UTIL_HPP_

// Internal helpers shared by the library sources; not installed.

#include <filesystem>
#include <string>
#include <string_view>

namespace cdm::detail {

std::string read_file(const std::filesystem::path& path);

/// Write via temp file + rename so concurrent writers of one path never
/// leave a torn file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string current_utc_timestamp();

}  // namespace cdm::detail

#endif  // CDM_SRC_IO_UTIL_HPP_

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
#ifndef CDM_DIGEST_HPP_
#define CDM_DIGEST_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace cdm {

/// SHA-256 of a byte string, as lowercase hex.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's raw bytes. Throws std::runtime_error on I/O failure.
std::string file_sha256_hex(const std::filesystem::path& path);

}  // namespace cdm

#endif  // CDM_DIGEST_HPP_

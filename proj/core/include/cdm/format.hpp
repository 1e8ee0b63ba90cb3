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
#ifndef CDM_FORMAT_HPP_
#define CDM_FORMAT_HPP_

#include <string>
#include <string_view>

namespace cdm {

/// Fixed-point rendering used for every displayed rating ("0.7789").
std::string format_fixed(double value, int decimals = 4);

/// RFC-4180 style quoting: fields containing commas, quotes or newlines are
/// wrapped and inner quotes doubled; everything else passes through.
std::string csv_quote(std::string_view field);

}  // namespace cdm

#endif  // CDM_FORMAT_HPP_

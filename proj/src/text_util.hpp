/**
 * Copyright 2026 The yoloprep Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace yoloprep::detail {

inline bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_space(s.front()))
    {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back()))
    {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && is_space(s[i]))
        {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !is_space(s[i]))
        {
            ++i;
        }
        if (i > start)
        {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

/// Splits on '\n'. A trailing newline does not produce an extra empty line.
inline std::vector<std::string_view> split_lines(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < s.size())
    {
        const auto end = s.find('\n', start);
        if (end == std::string_view::npos)
        {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_on(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto end = s.find(sep, start);
        out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos)
        {
            break;
        }
        start = end + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s)
{
    if (!s.empty() && s.front() == '+')
    {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    {
        return std::nullopt;
    }
    return v;
}

inline std::optional<int> parse_int(std::string_view s)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    {
        return std::nullopt;
    }
    return v;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    {
        return std::nullopt;
    }
    return v;
}

} // namespace yoloprep::detail

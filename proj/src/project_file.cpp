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

#include "yoloprep/project_file.hpp"

#include "text_util.hpp"
#include "yoloprep/image_io.hpp"

#include <map>
#include <set>

namespace yoloprep {

namespace {

const std::set<std::string, std::less<>> known_keys{
    "name",  "dataset", "classes",     "train_pct", "seed",   "output", "batch", "subdivisions",
    "steps", "width",   "max_batches", "height",    "pretrained_weights",
};

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value)
{
    std::filesystem::path p{std::string(value)};
    if (p.is_relative())
    {
        p = base / p;
    }
    return std::filesystem::absolute(p).lexically_normal();
}

int positive_int(const std::string& key, std::string_view value)
{
    const auto v = detail::parse_int(value);
    if (!v || *v < 1)
    {
        throw ProjectFileError(key + " must be a positive integer, got '" + std::string(value) + "'");
    }
    return *v;
}

double parse_train_pct(std::string_view value)
{
    bool percent = false;
    if (!value.empty() && value.back() == '%')
    {
        percent = true;
        value.remove_suffix(1);
    }
    auto v = detail::parse_double(detail::trim(value));
    if (!v)
    {
        throw ProjectFileError("train_pct must be a number, got '" + std::string(value) + "'");
    }
    if (percent)
    {
        *v /= 100.0;
    }
    if (!(*v > 0.0 && *v < 1.0))
    {
        throw ProjectFileError("train_pct must be in (0, 1) or (0%, 100%)");
    }
    return *v;
}

} // namespace

bool is_safe_project_name(std::string_view name) noexcept
{
    if (name.empty() || name.front() == '.')
    {
        return false;
    }
    for (const char c : name)
    {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                        c == '_' || c == '-';
        if (!ok)
        {
            return false;
        }
    }
    return true;
}

ProjectConfig parse_project_file(std::string_view text, const std::filesystem::path& base_dir)
{
    std::map<std::string, std::string, std::less<>> values;
    std::size_t line_no = 0;
    for (const auto raw : detail::split_lines(text))
    {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#')
        {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ProjectFileError("expected 'key = value', line " + std::to_string(line_no));
        }
        std::string key(detail::trim(line.substr(0, eq)));
        const auto value = detail::trim(line.substr(eq + 1));
        if (!known_keys.contains(key))
        {
            throw ProjectFileError("unknown key '" + key + "', line " + std::to_string(line_no));
        }
        if (!values.emplace(key, std::string(value)).second)
        {
            throw ProjectFileError("duplicate key '" + key + "', line " + std::to_string(line_no));
        }
    }

    for (const char* key : {"name", "dataset", "classes", "train_pct"})
    {
        if (!values.contains(key))
        {
            throw ProjectFileError(std::string("missing required key '") + key + "'");
        }
    }

    ProjectConfig cfg;
    cfg.name = values["name"];
    if (!is_safe_project_name(cfg.name))
    {
        throw ProjectFileError("project name '" + cfg.name + "' must use only letters, digits, '.', '_' and '-'");
    }
    cfg.dataset_path = resolve(base_dir, values["dataset"]);

    for (const auto part : detail::split_on(values["classes"], ','))
    {
        const auto name = detail::trim(part);
        if (name.empty())
        {
            throw ProjectFileError("empty class name in 'classes'");
        }
        cfg.classes.emplace_back(name);
    }
    if (std::set<std::string>(cfg.classes.begin(), cfg.classes.end()).size() != cfg.classes.size())
    {
        throw ProjectFileError("duplicate class names in 'classes'");
    }

    cfg.train_pct = parse_train_pct(values["train_pct"]);

    if (const auto it = values.find("seed"); it != values.end())
    {
        const auto seed = detail::parse_u64(it->second);
        if (!seed)
        {
            throw ProjectFileError("seed must be an unsigned 64-bit integer");
        }
        cfg.seed = *seed;
    }
    cfg.output_root = values.contains("output") ? resolve(base_dir, values["output"])
                                                : std::filesystem::absolute(base_dir).lexically_normal();

    cfg.hyper = default_hyper(cfg.classes.size());
    auto& h = cfg.hyper;
    if (values.contains("batch"))
    {
        h.batch = positive_int("batch", values["batch"]);
    }
    if (values.contains("subdivisions"))
    {
        h.subdivisions = positive_int("subdivisions", values["subdivisions"]);
    }
    if (values.contains("width"))
    {
        h.width = positive_int("width", values["width"]);
    }
    if (values.contains("height"))
    {
        h.height = positive_int("height", values["height"]);
    }
    if (values.contains("max_batches"))
    {
        h.max_batches = positive_int("max_batches", values["max_batches"]);
        h.steps = {h.max_batches * 8 / 10, h.max_batches * 9 / 10};
    }
    if (values.contains("steps"))
    {
        const auto parts = detail::split_on(values["steps"], ',');
        if (parts.size() != 2)
        {
            throw ProjectFileError("steps must be two comma-separated integers");
        }
        h.steps = {positive_int("steps", detail::trim(parts[0])), positive_int("steps", detail::trim(parts[1]))};
    }
    if (values.contains("pretrained_weights") && !values["pretrained_weights"].empty())
    {
        h.pretrained_weights = resolve(base_dir, values["pretrained_weights"]);
    }

    try
    {
        check_hyper(h);
    }
    catch (const ConfigError& e)
    {
        throw ProjectFileError(e.what());
    }
    return cfg;
}

ProjectConfig load_project_file(const std::filesystem::path& path)
{
    std::string text;
    try
    {
        text = read_text_file(path);
    }
    catch (const ImageIoError&)
    {
        throw ProjectFileError("cannot read project file " + path.string());
    }
    return parse_project_file(text, std::filesystem::absolute(path).parent_path());
}

} // namespace yoloprep

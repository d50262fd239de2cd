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

#include "yoloprep/darknet_gen.hpp"

#include "text_util.hpp"

#include <algorithm>

namespace yoloprep {

namespace {

struct Section
{
    std::string name;
    std::size_t first_line = 0; // header line index
    std::size_t end_line = 0;   // one past the last line of the section
};

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
    {
        line.remove_suffix(1);
    }
    return line;
}

std::optional<std::string> section_name(std::string_view line)
{
    const auto t = detail::trim(line);
    if (t.size() >= 2 && t.front() == '[' && t.back() == ']')
    {
        return std::string(detail::trim(t.substr(1, t.size() - 2)));
    }
    return std::nullopt;
}

std::optional<std::string> key_of(std::string_view line)
{
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';')
    {
        return std::nullopt;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
    {
        return std::nullopt;
    }
    return std::string(detail::trim(t.substr(0, eq)));
}

/// Replaces the value after '=' and keeps the key, the separator spacing and
/// any trailing carriage return.
std::string replace_value(std::string_view line, const std::string& value)
{
    const bool cr = !line.empty() && line.back() == '\r';
    const auto body = strip_cr(line);
    auto pos = body.find('=') + 1;
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t'))
    {
        ++pos;
    }
    std::string out(body.substr(0, pos));
    out += value;
    if (cr)
    {
        out += '\r';
    }
    return out;
}

std::string quote(const std::filesystem::path& p)
{
    const auto s = p.string();
    if (s.find_first_of(" \t'\"$&;|<>()*?`\\") == std::string::npos)
    {
        return s;
    }
    std::string out = "'";
    for (const char c : s)
    {
        if (c == '\'')
        {
            out += "'\\''";
        }
        else
        {
            out += c;
        }
    }
    return out + "'";
}

void require_absolute(const std::filesystem::path& p)
{
    if (p.empty() || !p.is_absolute())
    {
        throw ConfigError("paths must be absolute: '" + p.string() + "'");
    }
}

} // namespace

TrainingHyper default_hyper(std::size_t class_count)
{
    TrainingHyper h;
    h.max_batches = std::max(6000, 2000 * static_cast<int>(class_count));
    h.steps = {h.max_batches * 8 / 10, h.max_batches * 9 / 10};
    return h;
}

void check_hyper(const TrainingHyper& h)
{
    if (h.batch < 1 || h.subdivisions < 1 || h.batch % h.subdivisions != 0)
    {
        throw ConfigError("subdivisions must be positive and divide batch");
    }
    if (h.max_batches < 1)
    {
        throw ConfigError("max_batches must be positive");
    }
    if (!(h.steps[0] < h.steps[1] && h.steps[1] < h.max_batches && h.steps[0] > 0))
    {
        throw ConfigError("steps must be positive, strictly increasing and below max_batches");
    }
    if (h.width < 32 || h.height < 32 || h.width % 32 != 0 || h.height % 32 != 0)
    {
        throw ConfigError("network width and height must be multiples of 32");
    }
}

ArtifactPaths artifact_paths(const ProjectConfig& project, const LayoutPaths& layout)
{
    ArtifactPaths out;
    out.names = layout.root / (project.name + ".names");
    out.data = layout.root / (project.name + ".data");
    out.cfg = layout.root / (project.name + ".cfg");
    out.final_weights = layout.backup_dir / (project.name + "_final.weights");
    return out;
}

std::string render_names(const std::vector<std::string>& classes)
{
    if (classes.empty())
    {
        throw ConfigError("class list is empty");
    }
    std::string out;
    for (const auto& c : classes)
    {
        if (c.empty() || c.find_first_of("\r\n") != std::string::npos)
        {
            throw ConfigError("invalid class name '" + c + "'");
        }
        out += c;
        out += '\n';
    }
    return out;
}

std::string render_data(const ProjectConfig& project, const LayoutPaths& layout)
{
    if (project.classes.empty())
    {
        throw ConfigError("class list is empty");
    }
    if (layout.root.empty() || layout.train_list.empty() || layout.test_list.empty() || layout.backup_dir.empty())
    {
        throw ConfigError("layout paths are missing");
    }
    require_absolute(layout.root);
    require_absolute(layout.train_list);
    require_absolute(layout.test_list);
    require_absolute(layout.backup_dir);

    const auto art = artifact_paths(project, layout);
    std::string out;
    out += "classes = " + std::to_string(project.classes.size()) + "\n";
    out += "train = " + layout.train_list.string() + "\n";
    out += "valid = " + layout.test_list.string() + "\n";
    out += "names = " + art.names.string() + "\n";
    out += "backup = " + layout.backup_dir.string() + "\n";
    return out;
}

std::string render_cfg(std::string_view cfg_template, int class_count, const TrainingHyper& hyper)
{
    if (class_count < 1)
    {
        throw ConfigError("class count must be at least 1");
    }
    check_hyper(hyper);

    std::vector<std::string_view> lines = detail::split_lines(cfg_template);
    const bool trailing_newline = !cfg_template.empty() && cfg_template.back() == '\n';

    std::vector<Section> sections;
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        if (auto name = section_name(lines[i]))
        {
            if (!sections.empty())
            {
                sections.back().end_line = i;
            }
            sections.push_back(Section{*name, i, lines.size()});
        }
    }

    std::vector<std::string> out(lines.begin(), lines.end());

    auto rewrite = [&](const Section& s, const std::string& key, const std::string& value) {
        bool found = false;
        for (std::size_t i = s.first_line + 1; i < s.end_line; ++i)
        {
            if (key_of(lines[i]) == key)
            {
                out[i] = replace_value(lines[i], value);
                found = true;
            }
        }
        if (!found)
        {
            throw ConfigError("[" + s.name + "] section at line " + std::to_string(s.first_line + 1) + " has no '" +
                              key + "' key");
        }
    };

    const std::string filters = std::to_string((class_count + 5) * 3);
    const std::string classes = std::to_string(class_count);
    std::size_t yolo_count = 0;

    for (std::size_t k = 0; k < sections.size(); ++k)
    {
        const auto& s = sections[k];
        if (s.name == "net")
        {
            rewrite(s, "batch", std::to_string(hyper.batch));
            rewrite(s, "subdivisions", std::to_string(hyper.subdivisions));
            rewrite(s, "width", std::to_string(hyper.width));
            rewrite(s, "height", std::to_string(hyper.height));
            rewrite(s, "max_batches", std::to_string(hyper.max_batches));
            rewrite(s, "steps", std::to_string(hyper.steps[0]) + "," + std::to_string(hyper.steps[1]));
        }
        else if (s.name == "yolo")
        {
            if (k == 0 || sections[k - 1].name != "convolutional")
            {
                throw ConfigError("[yolo] section at line " + std::to_string(s.first_line + 1) +
                                  " is not preceded by a [convolutional] section");
            }
            rewrite(s, "classes", classes);
            rewrite(sections[k - 1], "filters", filters);
            ++yolo_count;
        }
    }
    if (yolo_count == 0)
    {
        throw ConfigError("template has no [yolo] sections");
    }

    std::string text;
    text.reserve(cfg_template.size() + 64);
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        text += out[i];
        if (i + 1 < out.size() || trailing_newline)
        {
            text += '\n';
        }
    }
    return text;
}

std::vector<std::string> emit_commands(const ProjectConfig& project, const LayoutPaths& layout,
                                       std::string_view darknet)
{
    const auto art = artifact_paths(project, layout);
    const std::string base = std::string(darknet) + " detector ";

    std::string train = base + "train " + quote(art.data) + " " + quote(art.cfg);
    if (project.hyper.pretrained_weights)
    {
        train += " " + quote(*project.hyper.pretrained_weights);
    }
    std::string evaluate = base + "map " + quote(art.data) + " " + quote(art.cfg) + " " + quote(art.final_weights);
    std::string predict =
        base + "test " + quote(art.data) + " " + quote(art.cfg) + " " + quote(art.final_weights) + " <IMAGE>";
    return {std::move(train), std::move(evaluate), std::move(predict)};
}

} // namespace yoloprep

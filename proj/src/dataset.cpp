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

#include "yoloprep/dataset.hpp"

#include "text_util.hpp"
#include "yoloprep/image_io.hpp"
#include "yoloprep/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

namespace yoloprep {

namespace {

// Tolerance, in pixels, for boxes poking out of the image frame.
constexpr double frame_tolerance_px = 0.5;

IssueKind issue_kind_for(AnnotationErrorKind kind)
{
    switch (kind)
    {
    case AnnotationErrorKind::ClassOutOfRange:
        return IssueKind::ClassOutOfRange;
    case AnnotationErrorKind::CoordinateOutOfRange:
        return IssueKind::CoordinateOutOfRange;
    case AnnotationErrorKind::ZeroArea:
        return IssueKind::ZeroAreaBox;
    default:
        return IssueKind::ParseError;
    }
}

bool inside_frame(const CenterBox& box, int width, int height)
{
    const double W = width;
    const double H = height;
    return (box.cx - box.w / 2.0) * W >= -frame_tolerance_px && (box.cx + box.w / 2.0) * W <= W + frame_tolerance_px &&
           (box.cy - box.h / 2.0) * H >= -frame_tolerance_px && (box.cy + box.h / 2.0) * H <= H + frame_tolerance_px;
}

void check_classes(const std::vector<std::string>& classes)
{
    std::set<std::string> seen;
    for (const auto& c : classes)
    {
        if (c.empty())
        {
            throw DatasetError("class names must be non-empty");
        }
        if (!seen.insert(c).second)
        {
            throw DatasetError("duplicate class name '" + c + "'");
        }
    }
}

void ensure_directory(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
    {
        throw DatasetError("cannot create " + dir.string() + ": " + ec.message());
    }
}

std::string list_text(const std::vector<fs::path>& paths)
{
    std::string out;
    for (const auto& p : paths)
    {
        out += p.string();
        out += '\n';
    }
    return out;
}

} // namespace

const char* to_string(IssueKind kind) noexcept
{
    switch (kind)
    {
    case IssueKind::BadMagic:
        return "bad-magic";
    case IssueKind::MissingLabel:
        return "missing-label";
    case IssueKind::ParseError:
        return "parse-error";
    case IssueKind::ClassOutOfRange:
        return "class-out-of-range";
    case IssueKind::CoordinateOutOfRange:
        return "coordinate-out-of-range";
    case IssueKind::ZeroAreaBox:
        return "zero-area-box";
    case IssueKind::DuplicateId:
        return "duplicate-id";
    }
    return "unknown";
}

std::vector<std::string> ValidationReport::failing_ids() const
{
    std::vector<std::string> ids;
    for (const auto& issue : issues)
    {
        ids.push_back(issue.image);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

fs::path label_path_for(const fs::path& image_path)
{
    fs::path p = image_path;
    p.replace_extension(".txt");
    return p;
}

bool is_jpg_path(const fs::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg";
}

ImageRecord load_image_record(const fs::path& image_path, int class_count)
{
    ImageRecord rec;
    rec.image_path = image_path;
    rec.label_path = label_path_for(image_path);
    rec.labels.id = image_path.stem().string();

    if (const auto size = read_jpeg_size(image_path))
    {
        rec.labels.width = size->width;
        rec.labels.height = size->height;
    }

    std::error_code ec;
    if (fs::is_regular_file(rec.label_path, ec))
    {
        rec.label_text = read_text_file(rec.label_path);
        std::size_t line_no = 0;
        for (const auto line : detail::split_lines(*rec.label_text))
        {
            ++line_no;
            if (detail::trim(line).empty() || class_count < 1)
            {
                continue;
            }
            try
            {
                rec.labels.boxes.push_back(parse_yolo_line(line, class_count, line_no));
            }
            catch (const AnnotationError&)
            {
                // reported by validate()
            }
        }
    }
    return rec;
}

DatasetManifest scan_dataset(const fs::path& root, const std::vector<std::string>& classes)
{
    check_classes(classes);

    std::error_code ec;
    if (!fs::is_directory(root, ec))
    {
        throw DatasetError("not a readable directory: " + root.string());
    }

    std::vector<fs::path> files;
    fs::directory_iterator it(root, ec);
    if (ec)
    {
        throw DatasetError("cannot read " + root.string() + ": " + ec.message());
    }
    for (const auto& entry : it)
    {
        if (entry.is_regular_file(ec) && is_jpg_path(entry.path()))
        {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    DatasetManifest manifest;
    manifest.root = root;
    manifest.classes = classes;
    manifest.images.reserve(files.size());
    for (const auto& f : files)
    {
        manifest.images.push_back(load_image_record(f, static_cast<int>(classes.size())));
    }
    return manifest;
}

ValidationReport validate(const DatasetManifest& manifest)
{
    const int class_count = static_cast<int>(manifest.classes.size());
    ValidationReport report;
    std::set<std::string> seen;

    auto add = [&report](const std::string& image, IssueKind kind, std::string detail) {
        report.issues.push_back(Issue{image, kind, std::move(detail)});
    };

    for (const auto& rec : manifest.images)
    {
        const auto& id = rec.id();
        if (!seen.insert(id).second)
        {
            add(id, IssueKind::DuplicateId, "id already used; " + rec.image_path.filename().string());
        }

        if (!has_jpeg_magic(rec.image_path))
        {
            add(id, IssueKind::BadMagic, rec.image_path.filename().string() + " does not start with FF D8 FF");
        }

        if (!rec.label_text)
        {
            add(id, IssueKind::MissingLabel, "no label file " + rec.label_path.filename().string());
            continue;
        }

        std::size_t line_no = 0;
        for (const auto line : detail::split_lines(*rec.label_text))
        {
            ++line_no;
            if (detail::trim(line).empty())
            {
                continue;
            }
            try
            {
                const auto box = parse_yolo_line(line, class_count, line_no);
                if (rec.has_size() && !inside_frame(box, rec.labels.width, rec.labels.height))
                {
                    add(id, IssueKind::CoordinateOutOfRange, "box extends past the image frame, line " + std::to_string(line_no));
                }
            }
            catch (const AnnotationError& e)
            {
                add(id, issue_kind_for(e.kind()), e.what());
            }
        }
    }

    std::stable_sort(report.issues.begin(), report.issues.end(),
                     [](const Issue& a, const Issue& b) { return a.image < b.image; });
    for (const auto& issue : report.issues)
    {
        ++report.counts[issue.kind];
    }
    return report;
}

std::size_t train_size(std::size_t n, double train_pct)
{
    // The epsilon keeps products like 0.29 * 100 from flooring to 28.
    auto t = static_cast<std::size_t>(std::floor(train_pct * static_cast<double>(n) + 1e-9));
    if (n > 0 && t >= n)
    {
        t = n - 1;
    }
    return t;
}

SplitResult split(const DatasetManifest& manifest, double train_pct, std::uint64_t seed)
{
    if (!(train_pct > 0.0 && train_pct < 1.0))
    {
        throw std::invalid_argument("train_pct must be in (0, 1)");
    }
    const std::size_t n = manifest.images.size();
    if (n < 2)
    {
        throw DatasetError("need at least 2 images to split, have " + std::to_string(n));
    }

    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& rec : manifest.images)
    {
        ids.push_back(rec.id());
    }
    std::sort(ids.begin(), ids.end());

    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
    {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i + 1));
        std::swap(ids[i], ids[j]);
    }

    const auto cut = static_cast<std::ptrdiff_t>(train_size(n, train_pct));
    SplitResult out;
    out.seed = seed;
    out.train_pct = train_pct;
    out.train.assign(ids.begin(), ids.begin() + cut);
    out.test.assign(ids.begin() + cut, ids.end());
    return out;
}

LayoutPaths layout_paths(const fs::path& out_root, const std::string& project)
{
    LayoutPaths paths;
    paths.root = fs::absolute(out_root / project).lexically_normal();
    paths.images_dir = paths.root / "images";
    paths.train_list = paths.root / "train.txt";
    paths.test_list = paths.root / "test.txt";
    paths.backup_dir = paths.root / "backup";
    return paths;
}

LayoutPaths materialize_layout(const DatasetManifest& manifest, const SplitResult& split_result,
                               const fs::path& out_root, const std::string& project, bool force)
{
    if (project.empty())
    {
        throw DatasetError("project name must be non-empty");
    }
    auto paths = layout_paths(out_root, project);

    std::error_code ec;
    if (!force && (fs::exists(paths.train_list, ec) || fs::exists(paths.test_list, ec)))
    {
        throw DatasetError("layout exists: " + paths.root.string());
    }

    std::unordered_map<std::string, const ImageRecord*> by_id;
    for (const auto& rec : manifest.images)
    {
        by_id.emplace(rec.id(), &rec);
    }

    ensure_directory(paths.images_dir);
    ensure_directory(paths.backup_dir);

    auto place = [&](const std::string& id) {
        const auto found = by_id.find(id);
        if (found == by_id.end())
        {
            throw DatasetError("split refers to unknown image id '" + id + "'");
        }
        const ImageRecord& rec = *found->second;
        const fs::path dst = paths.images_dir / rec.image_path.filename();
        const fs::path src = fs::absolute(rec.image_path).lexically_normal();
        if (src != dst)
        {
            std::error_code copy_ec;
            fs::copy_file(src, dst, fs::copy_options::overwrite_existing, copy_ec);
            if (copy_ec)
            {
                throw DatasetError("cannot copy " + src.string() + ": " + copy_ec.message());
            }
            write_text_file(label_path_for(dst), rec.label_text.value_or(""));
        }
        return dst;
    };

    try
    {
        for (const auto& id : split_result.train)
        {
            paths.train_images.push_back(place(id));
        }
        for (const auto& id : split_result.test)
        {
            paths.test_images.push_back(place(id));
        }
        write_text_file(paths.train_list, list_text(paths.train_images));
        write_text_file(paths.test_list, list_text(paths.test_images));
    }
    catch (const ImageIoError& e)
    {
        throw DatasetError(e.what());
    }
    return paths;
}

std::vector<LabeledImage> load_test_set(const LayoutPaths& layout, int class_count)
{
    std::string listing;
    try
    {
        listing = read_text_file(layout.test_list);
    }
    catch (const ImageIoError& e)
    {
        throw DatasetError(std::string("no test list: ") + e.what());
    }

    std::vector<LabeledImage> truth;
    for (const auto line : detail::split_lines(listing))
    {
        const auto entry = detail::trim(line);
        if (entry.empty())
        {
            continue;
        }
        const fs::path image_path{std::string(entry)};
        LabeledImage img;
        img.id = image_path.stem().string();
        const auto size = read_jpeg_size(image_path);
        if (!size)
        {
            throw DatasetError("cannot read image header: " + image_path.string());
        }
        img.width = size->width;
        img.height = size->height;

        const auto label = label_path_for(image_path);
        std::string text;
        try
        {
            text = read_text_file(label);
        }
        catch (const ImageIoError& e)
        {
            throw DatasetError(e.what());
        }
        try
        {
            img.boxes = parse_yolo_annotation(text, class_count);
        }
        catch (const AnnotationError& e)
        {
            throw DatasetError(label.string() + ": " + e.what());
        }
        truth.push_back(std::move(img));
    }
    return truth;
}

} // namespace yoloprep

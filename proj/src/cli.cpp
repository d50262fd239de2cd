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

#include "yoloprep/cli.hpp"

#include "text_util.hpp"
#include "yoloprep/augmentation.hpp"
#include "yoloprep/darknet_gen.hpp"
#include "yoloprep/dataset.hpp"
#include "yoloprep/evaluation.hpp"
#include "yoloprep/image_io.hpp"
#include "yoloprep/project_file.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>

namespace yoloprep {

void Console::info(std::string_view text)
{
    if (!quiet_)
    {
        out_ << text;
        out_.flush();
    }
}

void Console::result(std::string_view text)
{
    out_ << text;
    out_.flush();
}

void Console::error(std::string_view text)
{
    err_ << text;
    err_.flush();
}

namespace {

namespace fs = std::filesystem;

/// Raised inside a command to leave with a given exit code.
struct CommandExit
{
    int code;
    std::string message;
};

struct GlobalOptions
{
    std::string project;
    std::optional<std::uint64_t> seed;
    bool force = false;
    bool quiet = false;
};

struct PlanOptions
{
    std::vector<std::string> plan;
    bool no_original = false;
    double min_visibility = default_min_visibility;
    unsigned threads = 0;
};

struct EvalOptions
{
    double iou = 0.5;
    double conf = 0.25;
    std::string mode = "all_points";
};

std::string fixed4(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

ProjectConfig load_project(const GlobalOptions& g, const std::string& command)
{
    if (g.project.empty())
    {
        throw CommandExit{exit_usage, "usage: yoloprep " + command + " --project <file>\n"};
    }
    try
    {
        auto cfg = load_project_file(g.project);
        if (g.seed)
        {
            cfg.seed = *g.seed;
        }
        return cfg;
    }
    catch (const ProjectFileError& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\nusage: yoloprep " + command + " --project <file>\n"};
    }
}

DatasetManifest scan_or_exit(const ProjectConfig& cfg)
{
    try
    {
        return scan_dataset(cfg.dataset_path, cfg.classes);
    }
    catch (const DatasetError& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\n"};
    }
}

std::string format_issues(const ValidationReport& report)
{
    std::string out;
    for (const auto& issue : report.issues)
    {
        out += "  " + issue.image + ": " + to_string(issue.kind) + ": " + issue.detail + "\n";
    }
    return out;
}

/// Validates and, when forced, keeps only the images without issues.
DatasetManifest checked_manifest(const ProjectConfig& cfg, const GlobalOptions& g, Console& console)
{
    auto manifest = scan_or_exit(cfg);
    const auto report = validate(manifest);
    if (report.passed())
    {
        console.info("validated " + std::to_string(manifest.images.size()) + " images\n");
        return manifest;
    }

    console.result(format_issues(report));
    if (!g.force)
    {
        throw CommandExit{exit_failure, "validation failed with " + std::to_string(report.issues.size()) +
                                            " issue(s); fix them or pass --force to skip those images\n"};
    }

    const auto failing = report.failing_ids();
    const std::set<std::string> bad(failing.begin(), failing.end());
    std::erase_if(manifest.images, [&](const ImageRecord& r) { return bad.contains(r.id()); });
    console.info("--force: skipping " + std::to_string(bad.size()) + " image(s) with issues\n");
    return manifest;
}

AugmentationPlan make_plan(const PlanOptions& p, std::uint64_t seed)
{
    AugmentationPlan plan = default_plan(seed);
    if (!p.plan.empty())
    {
        plan.transforms.clear();
        for (const auto& item : p.plan)
        {
            try
            {
                plan.transforms.push_back(parse_transform(item));
            }
            catch (const std::invalid_argument& e)
            {
                throw CommandExit{exit_usage, std::string(e.what()) + "\n"};
            }
        }
    }
    plan.keep_original = !p.no_original;
    plan.min_visibility = p.min_visibility;
    return plan;
}

std::string template_text(const std::string& template_path)
{
    if (template_path.empty())
    {
        return std::string(yolov3_template());
    }
    try
    {
        return read_text_file(template_path);
    }
    catch (const ImageIoError& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\n"};
    }
}

std::string format_commands(const std::vector<std::string>& commands)
{
    static const char* const labels[] = {"train", "evaluate", "predict"};
    std::string out;
    for (std::size_t i = 0; i < commands.size(); ++i)
    {
        out += std::string("# ") + labels[i] + "\n" + commands[i] + "\n";
    }
    return out;
}

/// Writes .names, .data and .cfg into the layout root.
ArtifactPaths write_artifacts(const ProjectConfig& cfg, const LayoutPaths& layout, const std::string& cfg_template)
{
    const auto art = artifact_paths(cfg, layout);
    write_text_file(art.names, render_names(cfg.classes));
    write_text_file(art.data, render_data(cfg, layout));
    write_text_file(art.cfg, render_cfg(cfg_template, static_cast<int>(cfg.classes.size()), cfg.hyper));
    return art;
}

std::vector<Detection> load_detections(const fs::path& path, int class_count)
{
    std::string text;
    try
    {
        text = read_text_file(path);
    }
    catch (const ImageIoError& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\n"};
    }
    try
    {
        return parse_detections(text, class_count);
    }
    catch (const EvaluationError& e)
    {
        throw CommandExit{exit_failure, path.string() + ": " + e.what() + "\n"};
    }
}

std::vector<LabeledImage> load_truth(const ProjectConfig& cfg)
{
    const auto layout = layout_paths(cfg.output_root, cfg.name);
    try
    {
        return load_test_set(layout, static_cast<int>(cfg.classes.size()));
    }
    catch (const DatasetError& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\nrun 'yoloprep prepare' first\n"};
    }
}

EvalReport run_evaluation(const std::vector<Detection>& dets, const std::vector<LabeledImage>& truth,
                          const EvalOptions& o)
{
    try
    {
        return evaluate(dets, truth, o.iou, o.conf, parse_ap_mode(o.mode));
    }
    catch (const EvaluationError& e)
    {
        throw CommandExit{exit_failure, std::string(e.what()) + "\n"};
    }
    catch (const std::invalid_argument& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\n"};
    }
}

int cmd_validate(const GlobalOptions& g, Console& console)
{
    const auto cfg = load_project(g, "validate");
    const auto manifest = scan_or_exit(cfg);
    const auto report = validate(manifest);

    console.result(format_issues(report));
    std::string summary = std::to_string(manifest.images.size()) + " images, " +
                          std::to_string(report.issues.size()) + " issue(s)";
    for (const auto& [kind, count] : report.counts)
    {
        summary += std::string(", ") + to_string(kind) + "=" + std::to_string(count);
    }
    console.result(summary + (report.passed() ? "\nvalidation passed\n" : "\nvalidation failed\n"));
    return report.passed() ? exit_ok : exit_failure;
}

int cmd_convert(const GlobalOptions& g, const std::string& voc_dir, const std::string& out_dir,
                const std::string& classes_arg, Console& console)
{
    std::vector<std::string> classes;
    if (!classes_arg.empty())
    {
        for (const auto part : detail::split_on(classes_arg, ','))
        {
            classes.emplace_back(detail::trim(part));
        }
    }
    else if (!g.project.empty())
    {
        classes = load_project(g, "convert").classes;
    }
    else
    {
        throw CommandExit{exit_usage, "usage: yoloprep convert <voc_dir> <out_dir> --classes a,b\n"};
    }

    std::error_code ec;
    if (!fs::is_directory(voc_dir, ec))
    {
        throw CommandExit{exit_usage, "not a directory: " + voc_dir + "\n"};
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(voc_dir, ec))
    {
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
        {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    // convert everything first so nothing is written when any file fails
    std::vector<std::pair<fs::path, std::string>> outputs;
    std::set<std::string> unknown;
    std::vector<std::string> failures;
    for (const auto& f : files)
    {
        try
        {
            const auto voc = parse_voc_annotation(read_text_file(f));
            bool missing = false;
            for (const auto& box : voc.boxes)
            {
                if (std::find(classes.begin(), classes.end(), box.class_name) == classes.end())
                {
                    unknown.insert(box.class_name);
                    missing = true;
                }
            }
            if (missing)
            {
                continue;
            }
            const auto boxes = voc_to_yolo(voc.width, voc.height, voc.boxes, classes);
            outputs.emplace_back(fs::path(out_dir) / (f.stem().string() + ".txt"), serialize_yolo_annotation(boxes));
        }
        catch (const std::exception& e)
        {
            failures.push_back(f.filename().string() + ": " + e.what());
        }
    }

    if (!unknown.empty() || !failures.empty())
    {
        std::string msg;
        if (!unknown.empty())
        {
            msg += "unknown class name(s):";
            for (const auto& n : unknown)
            {
                msg += " " + n;
            }
            msg += "\n";
        }
        for (const auto& f : failures)
        {
            msg += f + "\n";
        }
        throw CommandExit{exit_failure, msg};
    }

    fs::create_directories(out_dir, ec);
    if (ec)
    {
        throw CommandExit{exit_usage, "cannot create " + out_dir + ": " + ec.message() + "\n"};
    }
    for (const auto& [path, text] : outputs)
    {
        write_text_file(path, text);
    }
    console.result("converted " + std::to_string(outputs.size()) + " annotation file(s)\n");
    return exit_ok;
}

int cmd_augment(const GlobalOptions& g, const PlanOptions& p, const std::string& out_dir, Console& console)
{
    const auto cfg = load_project(g, "augment");
    if (out_dir.empty())
    {
        throw CommandExit{exit_usage, "usage: yoloprep augment --project <file> --out <dir>\n"};
    }
    const auto manifest = checked_manifest(cfg, g, console);
    const auto plan = make_plan(p, cfg.seed);
    try
    {
        const auto out = augment_dataset(manifest, plan, out_dir, p.threads);
        console.result("wrote " + std::to_string(out.images.size()) + " images to " + out_dir + "\n");
    }
    catch (const AugmentationError& e)
    {
        throw CommandExit{exit_failure, std::string("augment failed: ") + e.what() + "\n"};
    }
    return exit_ok;
}

int cmd_split(const GlobalOptions& g, bool list, Console& console)
{
    const auto cfg = load_project(g, "split");
    const auto manifest = scan_or_exit(cfg);
    SplitResult s;
    try
    {
        s = split(manifest, cfg.train_pct, cfg.seed);
    }
    catch (const DatasetError& e)
    {
        throw CommandExit{exit_failure, std::string(e.what()) + "\n"};
    }
    console.result("train " + std::to_string(s.train.size()) + " / test " + std::to_string(s.test.size()) +
                   " (seed " + std::to_string(s.seed) + ")\n");
    if (list)
    {
        std::string text;
        for (const auto& id : s.train)
        {
            text += "train " + id + "\n";
        }
        for (const auto& id : s.test)
        {
            text += "test " + id + "\n";
        }
        console.result(text);
    }
    return exit_ok;
}

int cmd_prepare(const GlobalOptions& g, const PlanOptions& p, bool no_augment, const std::string& template_path,
                const std::string& darknet, Console& console)
{
    const auto cfg = load_project(g, "prepare");
    const auto cfg_template = template_text(template_path);
    auto manifest = checked_manifest(cfg, g, console);
    const auto layout = layout_paths(cfg.output_root, cfg.name);

    std::error_code ec;
    if (fs::exists(layout.root, ec) && !fs::is_empty(layout.root, ec))
    {
        if (!g.force)
        {
            throw CommandExit{exit_failure, "layout exists: " + layout.root.string() + " (use --force to replace it)\n"};
        }
        fs::remove_all(layout.root, ec);
        if (ec)
        {
            throw CommandExit{exit_usage, "cannot remove " + layout.root.string() + ": " + ec.message() + "\n"};
        }
    }

    std::string stage = "augment";
    try
    {
        if (!no_augment)
        {
            const auto plan = make_plan(p, cfg.seed);
            manifest = augment_dataset(manifest, plan, layout.images_dir, p.threads);
            console.info("augmented to " + std::to_string(manifest.images.size()) + " images\n");
        }

        stage = "split";
        const auto s = split(manifest, cfg.train_pct, cfg.seed);

        stage = "layout";
        const auto made = materialize_layout(manifest, s, cfg.output_root, cfg.name, false);
        console.info("train.txt: " + std::to_string(made.train_images.size()) + " images, test.txt: " +
                     std::to_string(made.test_images.size()) + " images\n");

        stage = "config";
        const auto art = write_artifacts(cfg, made, cfg_template);
        console.info("wrote " + art.names.string() + "\nwrote " + art.data.string() + "\nwrote " + art.cfg.string() +
                     "\n");
        console.result(format_commands(emit_commands(cfg, made, darknet)));
    }
    catch (const CommandExit&)
    {
        fs::remove_all(layout.root, ec);
        throw;
    }
    catch (const std::exception& e)
    {
        fs::remove_all(layout.root, ec);
        throw CommandExit{exit_failure, "prepare failed at stage '" + stage + "': " + e.what() + "\n"};
    }
    return exit_ok;
}

int cmd_gen_config(const GlobalOptions& g, const std::string& template_path, const std::string& darknet,
                   Console& console)
{
    const auto cfg = load_project(g, "gen-config");
    const auto cfg_template = template_text(template_path);
    const auto layout = layout_paths(cfg.output_root, cfg.name);
    std::error_code ec;
    if (!fs::exists(layout.train_list, ec) || !fs::exists(layout.test_list, ec))
    {
        throw CommandExit{exit_usage, "no layout at " + layout.root.string() + "; run 'yoloprep prepare' first\n"};
    }
    const auto art = artifact_paths(cfg, layout);
    if (!g.force && (fs::exists(art.cfg, ec) || fs::exists(art.data, ec) || fs::exists(art.names, ec)))
    {
        throw CommandExit{exit_failure, "configuration exists in " + layout.root.string() + " (use --force)\n"};
    }
    try
    {
        write_artifacts(cfg, layout, cfg_template);
    }
    catch (const ConfigError& e)
    {
        throw CommandExit{exit_failure, std::string(e.what()) + "\n"};
    }
    console.info("wrote " + art.names.string() + "\nwrote " + art.data.string() + "\nwrote " + art.cfg.string() + "\n");
    console.result(format_commands(emit_commands(cfg, layout, darknet)));
    return exit_ok;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& detections, const EvalOptions& o, Console& console)
{
    const auto cfg = load_project(g, "evaluate");
    if (detections.empty())
    {
        throw CommandExit{exit_usage, "usage: yoloprep evaluate --project <file> --detections <file>\n"};
    }
    const int class_count = static_cast<int>(cfg.classes.size());
    const auto truth = load_truth(cfg);
    const auto dets = load_detections(detections, class_count);
    const auto report = run_evaluation(dets, truth, o);

    console.result(format_report_text(report, cfg.classes));

    const fs::path det_path(detections);
    const fs::path csv = det_path.parent_path() / (det_path.stem().string() + "_eval.csv");
    try
    {
        write_text_file(csv, format_report_csv(report, cfg.classes));
    }
    catch (const ImageIoError& e)
    {
        throw CommandExit{exit_usage, std::string(e.what()) + "\n"};
    }
    console.info("wrote " + csv.string() + "\n");
    return exit_ok;
}

int cmd_report(const GlobalOptions& g, const std::vector<std::string>& checkpoints, const EvalOptions& o,
               Console& console)
{
    const auto cfg = load_project(g, "report");
    if (checkpoints.empty())
    {
        throw CommandExit{exit_usage, "usage: yoloprep report --project <file> [label=]detections.txt ...\n"};
    }
    const int class_count = static_cast<int>(cfg.classes.size());
    const auto truth = load_truth(cfg);

    std::vector<std::pair<std::string, EvalReport>> reports;
    for (const auto& arg : checkpoints)
    {
        const auto eq = arg.find('=');
        const std::string path = eq == std::string::npos ? arg : arg.substr(eq + 1);
        const std::string label = eq == std::string::npos ? fs::path(arg).stem().string() : arg.substr(0, eq);
        reports.emplace_back(label, run_evaluation(load_detections(path, class_count), truth, o));
    }

    char buf[256];
    std::string text;
    std::snprintf(buf, sizeof(buf), "%-20s %8s %10s %8s %8s\n", "checkpoint", "mAP", "precision", "recall", "F1");
    text += buf;
    for (const auto& [label, r] : reports)
    {
        std::snprintf(buf, sizeof(buf), "%-20s %8s %10s %8s %8s\n", label.c_str(), fixed4(r.map).c_str(),
                      fixed4(r.precision).c_str(), fixed4(r.recall).c_str(), fixed4(r.f1).c_str());
        text += buf;
    }
    text += "best checkpoint: " + select_best_checkpoint(reports) + "\n";
    console.result(text);
    return exit_ok;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Console console(out, err);

    CLI::App app{"Object-detection dataset preparation for Darknet YOLOv3", "yoloprep"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--project", g.project, "Project file (name, dataset, classes, train_pct)");
    app.add_option("--seed", g.seed, "Override the project seed");
    app.add_flag("--force", g.force, "Overwrite existing outputs; skip images that fail validation");
    app.add_flag("--quiet", g.quiet, "Only print results");

    PlanOptions plan;
    auto add_plan_options = [&plan](CLI::App* sub) {
        sub->add_option("--plan", plan.plan,
                        "Transforms: hflip vflip rot90 rot180 rot270 rot:<deg> noise:<sigma> gblur:<r> ablur:<k> "
                        "bright:<delta>")
            ->delimiter(',');
        sub->add_flag("--no-original", plan.no_original, "Do not keep the original images");
        sub->add_option("--min-visibility", plan.min_visibility, "Drop rotated boxes keeping less of their area")
            ->check(CLI::Range(0.0, 1.0));
        sub->add_option("--threads", plan.threads, "Worker threads (0 = all cores)");
    };

    EvalOptions eval;
    auto add_eval_options = [&eval](CLI::App* sub) {
        sub->add_option("--iou", eval.iou, "IoU threshold (strict)")->capture_default_str();
        sub->add_option("--conf", eval.conf, "Confidence threshold for precision/recall/F1")->capture_default_str();
        sub->add_option("--mode", eval.mode, "AP interpolation: all_points or eleven_point")->capture_default_str();
    };

    auto* validate_cmd = app.add_subcommand("validate", "Check images and labels");

    auto* convert_cmd = app.add_subcommand("convert", "Convert Pascal VOC XML files to YOLO labels");
    std::string voc_dir;
    std::string convert_out;
    std::string convert_classes;
    convert_cmd->add_option("voc_dir", voc_dir, "Directory with VOC .xml files")->required();
    convert_cmd->add_option("out_dir", convert_out, "Directory for YOLO .txt files")->required();
    convert_cmd->add_option("--classes", convert_classes, "Comma-separated class list (default: from project)");

    auto* augment_cmd = app.add_subcommand("augment", "Augment the dataset into a directory");
    std::string augment_out;
    augment_cmd->add_option("--out", augment_out, "Output directory")->required();
    add_plan_options(augment_cmd);

    auto* split_cmd = app.add_subcommand("split", "Show the train/test split");
    bool split_list = false;
    split_cmd->add_flag("--list", split_list, "Print the ids of each set");

    auto* prepare_cmd = app.add_subcommand("prepare", "Augment, split, lay out and configure a Darknet project");
    bool no_augment = false;
    std::string template_path;
    std::string darknet = "./darknet";
    prepare_cmd->add_flag("--no-augment", no_augment, "Skip augmentation");
    add_plan_options(prepare_cmd);

    auto* gen_cmd = app.add_subcommand("gen-config", "Write .names, .data and .cfg for an existing layout");
    for (auto* sub : {prepare_cmd, gen_cmd})
    {
        sub->add_option("--template", template_path, "YOLOv3 .cfg template (default: built-in)");
        sub->add_option("--darknet", darknet, "Darknet executable used in the emitted commands")->capture_default_str();
    }

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a detections file against the test set");
    std::string detections;
    evaluate_cmd->add_option("--detections", detections, "Detections file")->required();
    add_eval_options(evaluate_cmd);

    auto* report_cmd = app.add_subcommand("report", "Compare checkpoints and pick the best by mAP");
    std::vector<std::string> checkpoints;
    report_cmd->add_option("checkpoints", checkpoints, "[label=]detections.txt per checkpoint")->required();
    add_eval_options(report_cmd);

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    {
        sub->fallthrough();
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << e.what() << "\n" << app.help();
        return exit_usage;
    }

    console.set_quiet(g.quiet);

    try
    {
        if (validate_cmd->parsed())
        {
            return cmd_validate(g, console);
        }
        if (convert_cmd->parsed())
        {
            return cmd_convert(g, voc_dir, convert_out, convert_classes, console);
        }
        if (augment_cmd->parsed())
        {
            return cmd_augment(g, plan, augment_out, console);
        }
        if (split_cmd->parsed())
        {
            return cmd_split(g, split_list, console);
        }
        if (prepare_cmd->parsed())
        {
            return cmd_prepare(g, plan, no_augment, template_path, darknet, console);
        }
        if (gen_cmd->parsed())
        {
            return cmd_gen_config(g, template_path, darknet, console);
        }
        if (evaluate_cmd->parsed())
        {
            return cmd_evaluate(g, detections, eval, console);
        }
        if (report_cmd->parsed())
        {
            return cmd_report(g, checkpoints, eval, console);
        }
    }
    catch (const CommandExit& e)
    {
        console.error(e.message);
        return e.code;
    }
    catch (const std::exception& e)
    {
        console.error(std::string("error: ") + e.what() + "\n");
        return exit_usage;
    }
    return exit_usage;
}

} // namespace yoloprep

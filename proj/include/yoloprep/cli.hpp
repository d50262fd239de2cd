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

#include <ostream>
#include <string>
#include <string_view>

namespace yoloprep {

/// Exit codes shared by every subcommand.
enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1, // validation or evaluation found problems, or a stage failed
    exit_usage = 2,   // bad arguments, unreadable project or dataset
};

/// All console output of the tool goes through this writer.
class Console
{
public:
    Console(std::ostream& out, std::ostream& err, bool quiet = false) : out_(out), err_(err), quiet_(quiet) {}

    void set_quiet(bool quiet) noexcept { quiet_ = quiet; }

    /// Progress and summaries, silenced by --quiet.
    void info(std::string_view text);

    /// Primary results (reports, commands); always printed.
    void result(std::string_view text);

    void error(std::string_view text);

private:
    std::ostream& out_;
    std::ostream& err_;
    bool quiet_;
};

/// Runs the command-line tool. `argv[0]` is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace yoloprep

#pragma once

#include <string>
#include <vector>

namespace ohmstat {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Compact identity suites behind the CLI check subcommands. Each entry is
// one named pass/fail with a measured quantity in the detail string.
std::vector<CheckResult> selftest_checks();
std::vector<CheckResult> green_checks();
std::vector<CheckResult> martingale_checks();
std::vector<CheckResult> meyers_checks(std::string* csv_out = nullptr);

int print_and_count_failures(const std::vector<CheckResult>& results);

} // namespace ohmstat

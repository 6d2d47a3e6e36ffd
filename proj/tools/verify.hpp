#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace tool {

struct VerifyConfig {
    std::vector<std::string> suites;  // empty means every suite
    std::uint64_t seed = 20260819;
    int workers = 1;
    std::string fault;  // "" or "xi-zero-branch"
    bool list_only = false;
    OutputOpts out;
};

std::vector<std::string> verify_suite_names();
int run_verify(const VerifyConfig& cfg);

}  // namespace tool

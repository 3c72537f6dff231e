#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "sohb/validation.hpp"

// Usage: sohb_acceptance [id ...]
int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    sohb::ValidationOptions opt;
    if (const char* s = std::getenv("SOHB_SEED")) opt.seed = std::strtoull(s, nullptr, 10);

    int failed = 0;
    try {
        sohb::run_validation(only, opt, [&](const sohb::CriterionResult& r) {
            if (!r.passed) ++failed;
            std::printf("%s\n", sohb::format_result(r).c_str());
            std::fflush(stdout);
        });
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}

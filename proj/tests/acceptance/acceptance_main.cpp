#include <cstdio>
#include <cstdlib>
#include <string>

#include "grokklab/acceptance.hpp"

int main(int argc, char** argv) {
    int only = 0;
    int scale = 256;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (a == "--scale" && i + 1 < argc) {
            scale = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N] [--scale D]\n", argv[0]);
            return 2;
        }
    }
    int failed = 0;
    for (int n = 1; n <= grokk::acceptance::kCriteria; ++n) {
        if (only != 0 && n != only) continue;
        const auto o = grokk::acceptance::run_criterion(n, scale);
        std::fputs(grokk::acceptance::format(o, true).c_str(), stdout);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}

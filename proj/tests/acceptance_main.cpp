#include <cstring>
#include <iostream>

#include "acceptance.hpp"

// One line per acceptance criterion; nonzero exit if any fails.
int main(int argc, char** argv) {
    using namespace fracflow::acceptance;
    Options opt;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) opt.level = Level::Full;
        else if (std::strcmp(argv[i], "--fast") == 0) opt.level = Level::Fast;
        else if (std::strcmp(argv[i], "--no-correction") == 0) opt.correction_enabled = false;
        else {
            std::cerr << "usage: acceptance [--fast | --full] [--no-correction]\n";
            return 2;
        }
    }
    int failed = 0, passed = 0, skipped = 0;
    run_all(opt, [&](const Result& r) {
        std::cout << format_result(r) << std::endl;
        if (r.skipped) ++skipped;
        else if (r.pass) ++passed;
        else ++failed;
    });
    std::cout << passed << " passed, " << failed << " failed, " << skipped << " skipped\n";
    return failed == 0 ? 0 : 1;
}

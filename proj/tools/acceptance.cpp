#include <cstdio>
#include <cstring>
#include <string>

#include "czkit/suites.hpp"

using namespace czkit;

// One line per acceptance criterion. Exit status is nonzero only with --strict
// (any red criterion) or when the corpus or calibration cannot be read.
int main(int argc, char** argv) {
    std::string root = CZKIT_SOURCE_DIR;
    bool strict = false;
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--strict")) strict = true;
        else if (!std::strcmp(argv[i], "--root") && i + 1 < argc) root = argv[++i];
        else if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = argv[++i];
    }
    try {
        SuiteRunner runner(load_corpus(root + "/corpus"), Calibration::load(root + "/calibration/frozen.json"));
        int red = 0;
        for (int id = 1; id <= 10; ++id) {
            if (!only.empty() && std::stoi(only) != id) continue;
            auto r = runner.run(id);
            if (!r.pass) ++red;
            std::printf("criterion %2d %-20s %s  (%.1fs)  %s\n", id, r.name.c_str(), r.pass ? "PASS" : "FAIL",
                        r.seconds, r.notes.empty() ? "" : r.notes.front().c_str());
            for (std::size_t k = 1; k < r.notes.size(); ++k) std::printf("      %s\n", r.notes[k].c_str());
            std::fflush(stdout);
        }
        std::printf("%d criteria red\n", red);
        return strict && red ? 2 : 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 3;
    }
}

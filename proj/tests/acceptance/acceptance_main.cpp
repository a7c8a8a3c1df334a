// Runs the acceptance criteria (all, or the ids given as arguments) and prints
// one line per criterion.

#include "glab/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <vector>

int main(int argc, char** argv)
{
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        ids.push_back(std::atoi(argv[i]));
    }
    const auto results = glab::acceptance::run_all(ids, [](const glab::acceptance::Result& r) {
        std::cout << glab::acceptance::format(r) << std::endl;
    });
    int failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
    }
    std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}

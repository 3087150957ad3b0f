#include "acceptance.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
    nlcomp::acceptance::SuiteOptions options;
    options.timing = true;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--no-timing") == 0) {
            options.timing = false;
        }
    }
    const auto results = nlcomp::acceptance::run_suite(options, std::cout);
    int passed = 0;
    for (const auto& r : results) {
        passed += r.pass ? 1 : 0;
    }
    std::cout << passed << '/' << results.size() << " criteria passed\n";
    return passed == static_cast<int>(results.size()) ? 0 : 1;
}

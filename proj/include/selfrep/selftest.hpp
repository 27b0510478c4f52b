#pragma once

#include <string>
#include <vector>

namespace selfrep {

struct SelfTestCase {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Quick consistency checks that need no statistics beyond a few thousand
// seeds. Each check is isolated: an exception marks that case failed.
std::vector<SelfTestCase> run_selftest(unsigned threads = 1);

}  // namespace selfrep

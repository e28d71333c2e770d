// properties.hpp: the module invariant checks run by the acceptance suite

#pragma once

#include <string>
#include <vector>

namespace properties {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<Check> run_all();

} // namespace properties

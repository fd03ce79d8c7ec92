#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nilctl {

// Exit statuses: 0 success (checks ran and passed), 1 usage or input
// error, 2 a check ran and failed.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace nilctl

#pragma once

#include <iosfwd>

namespace pacsyn {

/// Entry point of the pacsyn tool. Returns 0 on success, 1 when an input
/// fails validation, 2 on usage or runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pacsyn

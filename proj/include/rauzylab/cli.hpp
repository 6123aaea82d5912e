#ifndef RAUZYLAB_CLI_HPP
#define RAUZYLAB_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rauzylab {

// exit codes: 0 success, 2 validation/usage error, 3 cap or budget exceeded
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);
int run_command(const std::vector<std::string>& args);

}  // namespace rauzylab

#endif

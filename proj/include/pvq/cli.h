#ifndef PVQ_CLI_H_
#define PVQ_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace pvq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `pvq` tool. `args` excludes the program name. Errors
/// go to `err` as one line, "ERROR <code>: <message>".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pvq

#endif  // PVQ_CLI_H_

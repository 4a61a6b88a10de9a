#include "swarmctl/error.hpp"

namespace swarmctl {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {
std::string join_problems(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration (" + std::to_string(problems.size()) + " problem";
    out += problems.size() == 1 ? ")" : "s)";
    for (const auto& p : problems) {
        out += "; ";
        out += p;
    }
    return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace swarmctl

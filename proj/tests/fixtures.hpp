#ifndef SYMWM_TESTS_FIXTURES_HPP
#define SYMWM_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string fixture_path(const std::string &relative) {
    return std::string(SYMWM_FIXTURE_DIR) + "/" + relative;
}

inline std::string read_fixture(const std::string &relative) {
    std::ifstream in(fixture_path(relative), std::ios::binary);
    if (!in)
        throw std::runtime_error("missing fixture " + relative);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

#endif

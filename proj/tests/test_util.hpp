#ifndef RSKC_TESTS_TEST_UTIL_HPP
#define RSKC_TESTS_TEST_UTIL_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string tmp_path(const std::string& name) {
    std::filesystem::path dir(RSKC_TEST_TMP);
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

inline std::string write_file(const std::string& name, const std::string& content) {
    auto path = tmp_path(name);
    std::ofstream(path) << content;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}

#endif

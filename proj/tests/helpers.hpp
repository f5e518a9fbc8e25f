#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dynlab/maps.hpp"

namespace helpers {

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string config_path(const std::string& name) {
    return std::string(DYNLAB_CONFIG_DIR) + "/" + name + ".json";
}

// loads one of the shipped reference maps by file stem
inline dynlab::MapSpec load_map(const std::string& name) {
    return dynlab::parse_map_spec(read_file(config_path(name)));
}

}  // namespace helpers

#pragma once

#include <stdexcept>
#include <string>

namespace podforge {

// Error taxonomy shared by all modules. The CLI maps these to exit codes:
// usage problems exit 2, everything below exits 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PoolEmpty : Error {
    explicit PoolEmpty(const std::string& what) : Error("pool empty: " + what) {}
};

struct InvalidAsset : Error {
    explicit InvalidAsset(const std::string& id, const std::string& reason)
        : Error("invalid asset '" + id + "': " + reason) {}
};

struct IoError : Error {
    explicit IoError(const std::string& path, const std::string& reason)
        : Error("io error '" + path + "': " + reason) {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error("invalid argument: " + what) {}
};

struct CorruptScene : Error {
    explicit CorruptScene(const std::string& what) : Error("corrupt scene: " + what) {}
};

struct InsufficientScenes : Error {
    explicit InsufficientScenes(const std::string& what)
        : Error("insufficient scenes: " + what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& path, const std::string& reason)
        : Error("parse error '" + path + "': " + reason) {}
};

}  // namespace podforge

#pragma once

#include <stdexcept>
#include <string>

namespace nicbench {

// Error categories map onto the CLI exit codes (1/2/3).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class ingest_error : public std::runtime_error {
public:
    explicit ingest_error(const std::string& msg) : std::runtime_error(msg) {}
};

class train_error : public std::runtime_error {
public:
    explicit train_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nicbench

#pragma once

#include <stdexcept>
#include <string>

namespace coral {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lookup miss (chunk id, corpus, shard).
class NotFoundError : public Error {
public:
    using Error::Error;
};

// Malformed input: JSONL lines, agent output, script files.
class ParseError : public Error {
public:
    using Error::Error;
};

// Invalid configuration or policy values.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Endpoint unreachable after retries.
class TransportError : public Error {
public:
    using Error::Error;
};

// Scripted backend mismatch or exhaustion.
class ScriptError : public Error {
public:
    using Error::Error;
};

} // namespace coral

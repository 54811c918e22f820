#pragma once

#include <atomic>
#include <filesystem>
#include <string>

namespace coral_test {

// Unique scratch directory, removed on scope exit.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("coral_test_" + std::to_string(static_cast<unsigned long long>(
                                    std::hash<const void*>{}(this))) +
                "_" + std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

} // namespace coral_test

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <sys/types.h>

namespace sacscore::engine {

/// A child process connected through its standard input and output. Owns the
/// pipes and reaps the child on destruction.
class ChildProcess {
public:
    enum class ReadStatus { line, eof, timeout };

    /// Throws std::system_error when the executable cannot be started.
    ChildProcess(const std::filesystem::path& executable, const std::vector<std::string>& args);
    ChildProcess(ChildProcess&& other) noexcept;
    ChildProcess& operator=(ChildProcess&& other) noexcept;
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;
    ~ChildProcess();

    /// Writes `line` plus a newline. Returns false if the child closed its
    /// input (broken pipe).
    bool write_line(std::string_view line);

    /// Reads one line (without the terminator), waiting until `deadline`.
    ReadStatus read_line(std::string& out, std::chrono::steady_clock::time_point deadline);

    bool running();
    /// Closes stdin, waits up to `grace`, then kills.
    void terminate(std::chrono::milliseconds grace);

private:
    void close_fds();

    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool eof_ = false;
};

}  // namespace sacscore::engine

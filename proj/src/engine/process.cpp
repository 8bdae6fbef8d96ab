#include "sacscore/engine/process.hpp"

#include <cerrno>
#include <csignal>
#include <algorithm>
#include <mutex>
#include <system_error>
#include <thread>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace sacscore::engine {

namespace {

void ignore_sigpipe()
{
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

[[noreturn]] void throw_errno(int err, const std::string& what)
{
    throw std::system_error(err, std::generic_category(), what);
}

}  // namespace

ChildProcess::ChildProcess(const std::filesystem::path& executable, const std::vector<std::string>& args)
{
    ignore_sigpipe();
    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0)
        throw_errno(errno, "pipe");
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        const int err = errno;
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw_errno(err, "pipe");
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

    const std::string path = executable.string();
    std::vector<std::string> storage;
    storage.push_back(path);
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage)
        argv.push_back(s.data());
    argv.push_back(nullptr);

    const int rc = posix_spawn(&pid_, path.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        pid_ = -1;
        throw_errno(rc, "spawn " + path);
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

ChildProcess::ChildProcess(ChildProcess&& other) noexcept
    : pid_(other.pid_),
      to_child_(other.to_child_),
      from_child_(other.from_child_),
      buffer_(std::move(other.buffer_)),
      eof_(other.eof_)
{
    other.pid_ = -1;
    other.to_child_ = -1;
    other.from_child_ = -1;
}

ChildProcess& ChildProcess::operator=(ChildProcess&& other) noexcept
{
    if (this != &other) {
        terminate(std::chrono::milliseconds(0));
        pid_ = std::exchange(other.pid_, -1);
        to_child_ = std::exchange(other.to_child_, -1);
        from_child_ = std::exchange(other.from_child_, -1);
        buffer_ = std::move(other.buffer_);
        eof_ = other.eof_;
    }
    return *this;
}

ChildProcess::~ChildProcess() { terminate(std::chrono::milliseconds(500)); }

void ChildProcess::close_fds()
{
    if (to_child_ >= 0)
        ::close(to_child_);
    if (from_child_ >= 0)
        ::close(from_child_);
    to_child_ = -1;
    from_child_ = -1;
}

bool ChildProcess::write_line(std::string_view line)
{
    if (to_child_ < 0)
        return false;
    std::string data(line);
    data += '\n';
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(to_child_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

ChildProcess::ReadStatus ChildProcess::read_line(std::string& out, std::chrono::steady_clock::time_point deadline)
{
    while (true) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            out = buffer_.substr(0, nl);
            if (!out.empty() && out.back() == '\r')
                out.pop_back();
            buffer_.erase(0, nl + 1);
            return ReadStatus::line;
        }
        if (eof_ || from_child_ < 0) {
            if (!buffer_.empty()) {
                out = std::move(buffer_);
                buffer_.clear();
                return ReadStatus::line;
            }
            return ReadStatus::eof;
        }
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline)
            return ReadStatus::timeout;
        const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        pollfd pfd{from_child_, POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait + 1, 60'000)));
        if (rc < 0) {
            if (errno == EINTR)
                continue;
            throw_errno(errno, "poll");
        }
        if (rc == 0)
            continue;
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            eof_ = true;
        } else if (n == 0) {
            eof_ = true;
        } else {
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }
}

bool ChildProcess::running()
{
    if (pid_ < 0)
        return false;
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
        pid_ = -1;
        return false;
    }
    return r == 0;
}

void ChildProcess::terminate(std::chrono::milliseconds grace)
{
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (pid_ >= 0) {
        const auto until = std::chrono::steady_clock::now() + grace;
        while (running() && std::chrono::steady_clock::now() < until)
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        if (pid_ >= 0) {
            ::kill(pid_, SIGKILL);
            int status = 0;
            ::waitpid(pid_, &status, 0);
            pid_ = -1;
        }
    }
    close_fds();
}

}  // namespace sacscore::engine

#include "devskit/conformance/runner.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <mutex>

namespace devskit::conformance {
namespace {

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        struct sigaction action{};
        action.sa_handler = SIG_IGN;
        sigaction(SIGPIPE, &action, nullptr);
    });
}

struct Pipe {
    int read_fd = -1;
    int write_fd = -1;

    bool open() {
        int fds[2];
        if (pipe2(fds, O_CLOEXEC) != 0) {
            return false;
        }
        read_fd = fds[0];
        write_fd = fds[1];
        return true;
    }
    void close_read() {
        if (read_fd >= 0) {
            ::close(read_fd);
            read_fd = -1;
        }
    }
    void close_write() {
        if (write_fd >= 0) {
            ::close(write_fd);
            write_fd = -1;
        }
    }
    ~Pipe() {
        close_read();
        close_write();
    }
};

void set_nonblocking(int fd) {
    const int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

} // namespace

RunResult run_process(const RunSpec& spec) {
    RunResult result;
    if (spec.argv.empty()) {
        result.spawn_error = "empty command line";
        return result;
    }
    ignore_sigpipe_once();

    Pipe child_stdin;
    Pipe child_stdout;
    Pipe child_stderr;
    Pipe exec_status; // carries errno back if exec fails, closes clean otherwise
    if (!child_stdin.open() || !child_stdout.open() || !child_stderr.open() ||
        !exec_status.open()) {
        result.spawn_error = std::string("pipe: ") + std::strerror(errno);
        return result;
    }

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = fork();
    if (pid < 0) {
        result.spawn_error = std::string("fork: ") + std::strerror(errno);
        return result;
    }

    if (pid == 0) {
        // Child: own process group so a timeout can reap helpers too.
        setpgid(0, 0);
        dup2(child_stdin.read_fd, STDIN_FILENO);
        dup2(child_stdout.write_fd, STDOUT_FILENO);
        dup2(child_stderr.write_fd, STDERR_FILENO);

        std::vector<char*> argv;
        argv.reserve(spec.argv.size() + 1);
        for (const auto& arg : spec.argv) {
            argv.push_back(const_cast<char*>(arg.c_str()));
        }
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());

        const int saved = errno;
        ssize_t ignored = write(exec_status.write_fd, &saved, sizeof saved);
        (void)ignored;
        _exit(127);
    }

    // Parent.
    child_stdin.close_read();
    child_stdout.close_write();
    child_stderr.close_write();
    exec_status.close_write();

    {
        int exec_errno = 0;
        const ssize_t n = read(exec_status.read_fd, &exec_errno, sizeof exec_errno);
        if (n == static_cast<ssize_t>(sizeof exec_errno)) {
            result.spawn_error =
                spec.argv[0] + ": " + std::strerror(exec_errno);
            int status = 0;
            waitpid(pid, &status, 0);
            result.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            return result;
        }
    }
    exec_status.close_read();
    result.spawned = true;

    set_nonblocking(child_stdin.write_fd);
    set_nonblocking(child_stdout.read_fd);
    set_nonblocking(child_stderr.read_fd);
    if (spec.stdin_payload.empty()) {
        child_stdin.close_write();
    }

    const auto deadline =
        start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(spec.wall_timeout_s));
    std::size_t stdin_sent = 0;
    bool killed = false;
    std::chrono::steady_clock::time_point kill_time{};
    auto kill_child = [&] {
        if (!killed) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            killed = true;
            kill_time = std::chrono::steady_clock::now();
        }
    };

    std::array<char, 65536> buffer{};
    while (child_stdout.read_fd >= 0 || child_stderr.read_fd >= 0 ||
           child_stdin.write_fd >= 0) {
        std::array<pollfd, 3> fds{};
        nfds_t count = 0;
        auto add = [&](int fd, short events) {
            fds[count].fd = fd;
            fds[count].events = events;
            ++count;
        };
        if (child_stdout.read_fd >= 0) {
            add(child_stdout.read_fd, POLLIN);
        }
        if (child_stderr.read_fd >= 0) {
            add(child_stderr.read_fd, POLLIN);
        }
        if (child_stdin.write_fd >= 0) {
            add(child_stdin.write_fd, POLLOUT);
        }

        const auto now = std::chrono::steady_clock::now();
        int wait_ms = -1;
        if (!killed) {
            if (now >= deadline) {
                result.timed_out = true;
                kill_child();
                wait_ms = 100;
            } else {
                const auto remaining =
                    std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
                wait_ms = static_cast<int>(std::clamp<long long>(
                    remaining.count() + 1, 1, 60000));
            }
        } else {
            // Draining after a kill. Helpers that dodged the group kill could
            // hold the pipes open forever; give up after a grace period.
            if (now - kill_time > std::chrono::seconds(2)) {
                break;
            }
            wait_ms = 100;
        }

        const int ready = poll(fds.data(), count, wait_ms);
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            break;
        }
        if (ready == 0) {
            continue; // deadline handling happens at the top of the loop
        }

        for (nfds_t i = 0; i < count; ++i) {
            const pollfd& entry = fds[i];
            if (entry.revents == 0) {
                continue;
            }
            if (entry.fd == child_stdin.write_fd) {
                if (entry.revents & (POLLERR | POLLHUP)) {
                    child_stdin.close_write();
                    continue;
                }
                const ssize_t wrote =
                    write(entry.fd, spec.stdin_payload.data() + stdin_sent,
                          spec.stdin_payload.size() - stdin_sent);
                if (wrote > 0) {
                    stdin_sent += static_cast<std::size_t>(wrote);
                    if (stdin_sent == spec.stdin_payload.size()) {
                        child_stdin.close_write();
                    }
                } else if (wrote < 0 && errno != EAGAIN && errno != EINTR) {
                    child_stdin.close_write();
                }
                continue;
            }

            const bool is_stdout = entry.fd == child_stdout.read_fd;
            std::string& sink = is_stdout ? result.stdout_text : result.stderr_text;
            const std::size_t cap = is_stdout ? spec.stdout_cap : spec.stderr_cap;
            const ssize_t got = read(entry.fd, buffer.data(), buffer.size());
            if (got > 0) {
                const std::size_t room = cap > sink.size() ? cap - sink.size() : 0;
                const std::size_t take =
                    std::min(static_cast<std::size_t>(got), room);
                sink.append(buffer.data(), take);
                if (take < static_cast<std::size_t>(got) && is_stdout) {
                    result.output_capped = true;
                    kill_child();
                }
            } else if (got == 0 || (got < 0 && errno != EAGAIN && errno != EINTR)) {
                if (is_stdout) {
                    child_stdout.close_read();
                } else {
                    child_stderr.close_read();
                }
            }
        }
    }

    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status)) {
        result.exited_normally = true;
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.term_signal = WTERMSIG(status);
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace devskit::conformance

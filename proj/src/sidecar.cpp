#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <thread>

#include "stylo/embedding.hpp"
#include "stylo/error.hpp"

namespace stylo {

using nlohmann::json;

SidecarClient::SidecarClient(const std::vector<std::string>& command) {
    if (command.empty()) fail(ErrorKind::Validation, "sidecar command is empty");
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
        fail(ErrorKind::Provider, std::string("socketpair failed: ") + std::strerror(errno));

    std::vector<char*> argv;
    for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        fail(ErrorKind::Provider, std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(fds[1]);
    fd_ = fds[0];
    pid_ = pid;
}

SidecarClient::~SidecarClient() {
    if (fd_ >= 0) ::close(fd_);
    if (pid_ <= 0) return;
    // Closing the socket is the shutdown signal; escalate if the child lingers.
    using namespace std::chrono_literals;
    const auto deadline = std::chrono::steady_clock::now() + 2s;
    int status = 0;
    while (::waitpid(pid_, &status, WNOHANG) == 0) {
        if (std::chrono::steady_clock::now() > deadline) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            break;
        }
        std::this_thread::sleep_for(5ms);
    }
}

std::optional<std::string> SidecarClient::read_line() {
    for (;;) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return std::nullopt;
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::vector<double> SidecarClient::request(const std::string& id, const std::string& text) {
    std::lock_guard lock(mutex_);
    const std::string line = json{{"id", id}, {"text", text}}.dump() + "\n";
    std::size_t sent = 0;
    while (sent < line.size()) {
        const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) fail(ErrorKind::Provider, "sidecar closed its input while sending '" + id + "'");
        sent += static_cast<std::size_t>(n);
    }

    for (;;) {
        auto response = read_line();
        if (!response) fail(ErrorKind::Provider, "sidecar exited before answering '" + id + "'");
        if (response->empty()) continue;
        if ((*response)[0] == '#') {
            logs_.push_back(std::move(*response));
            continue;
        }
        json msg;
        try {
            msg = json::parse(*response);
        } catch (const json::parse_error&) {
            fail(ErrorKind::Provider, "sidecar sent malformed JSON for '" + id + "'");
        }
        if (!msg.is_object() || !msg.contains("id") || !msg["id"].is_string() ||
            !msg.contains("vector") || !msg["vector"].is_array())
            fail(ErrorKind::Provider, "sidecar response for '" + id + "' lacks id/vector");
        if (msg["id"].get<std::string>() != id)
            fail(ErrorKind::Provider, "sidecar answered '" + msg["id"].get<std::string>() +
                                          "' while '" + id + "' was pending");
        std::vector<double> out;
        out.reserve(msg["vector"].size());
        for (const auto& x : msg["vector"]) {
            if (!x.is_number()) fail(ErrorKind::Format, "sidecar vector has a non-numeric component");
            out.push_back(x.get<double>());
        }
        return out;
    }
}

}  // namespace stylo

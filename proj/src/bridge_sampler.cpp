// Copyright 2026 The qafem Authors.
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>

#include <json.hpp>

#include "qafem/errors.hpp"
#include "qafem/sampler.hpp"

namespace qafem {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void set_flags(int fd, int flags) {
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | flags);
    ::fcntl(fd, F_SETFD, FD_CLOEXEC);
}

}  // namespace

BridgeSampler::BridgeSampler(std::vector<std::string> command, double timeout_seconds)
    : command_(std::move(command)), timeout_(timeout_seconds) {
    if (command_.empty()) throw InvalidArgumentError("bridge command is empty");
    if (!(timeout_ > 0.0)) throw InvalidArgumentError("bridge timeout must be positive");
}

BridgeSampler::~BridgeSampler() { stop(); }

std::string BridgeSampler::encode_request(std::uint64_t id, const QuboProblem& problem) {
    std::string out = "{\"id\": " + std::to_string(id) + ", \"n\": " + std::to_string(problem.size) + ", \"entries\": [";
    for (std::size_t k = 0; k < problem.entries.size(); ++k) {
        const auto& e = problem.entries[k];
        if (k) out += ", ";
        out += "[" + std::to_string(e.i) + ", " + std::to_string(e.j) + ", " + format_double(e.value) + "]";
    }
    out += "], \"num_reads\": " + std::to_string(problem.num_reads) +
           ", \"annealing_time_us\": " + format_double(problem.annealing_time_us) +
           ", \"seed\": " + std::to_string(problem.seed) + "}";
    return out;
}

void BridgeSampler::start() {
    if (pid_ > 0) return;
    struct sigaction current {};
    ::sigaction(SIGPIPE, nullptr, &current);
    if (current.sa_handler == SIG_DFL) ::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2], out_pipe[2];
    if (::pipe(in_pipe) != 0) throw TransportError(std::string("pipe failed: ") + std::strerror(errno));
    if (::pipe(out_pipe) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw TransportError(std::string("pipe failed: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) throw TransportError(std::string("fork failed: ") + std::strerror(errno));
    if (pid == 0) {
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        std::vector<char*> argv;
        for (auto& a : command_) argv.push_back(a.data());
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        ::_exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    set_flags(to_child_, O_NONBLOCK);
    set_flags(from_child_, O_NONBLOCK);
    buffer_.clear();
}

void BridgeSampler::stop() noexcept {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        int status = 0;
        if (::waitpid(pid_, &status, WNOHANG) == 0) {
            ::kill(pid_, SIGTERM);
            ::waitpid(pid_, &status, 0);
        }
    }
    pid_ = -1;
    buffer_.clear();
}

SampleSet BridgeSampler::sample_block(const QuboProblem& problem) {
    return std::move(exchange({problem}).front());
}

std::vector<SampleSet> BridgeSampler::sample_blocks(const std::vector<QuboProblem>& problems) {
    return exchange(problems);
}

std::vector<SampleSet> BridgeSampler::exchange(const std::vector<QuboProblem>& problems) {
    for (const auto& p : problems) {
        if (p.size == 0) throw ProtocolError("empty QUBO problems are not sent to the bridge");
    }
    start();

    std::map<std::uint64_t, std::size_t> pending;
    std::string out;
    for (std::size_t k = 0; k < problems.size(); ++k) {
        const std::uint64_t id = next_id_++;
        pending[id] = k;
        out += encode_request(id, problems[k]);
        out += '\n';
    }
    std::vector<SampleSet> results(problems.size());
    std::size_t written = 0;

    auto fail = [this](auto error) {
        stop();
        throw error;
    };

    auto handle = [&](const std::string& line) {
        nlohmann::json msg;
        try {
            msg = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            fail(MalformedResponseError(std::string("bridge response is not JSON: ") + e.what(), line));
        }
        if (!msg.is_object() || !msg.contains("id") || !msg["id"].is_number_integer()) {
            fail(MalformedResponseError("bridge response without an integer id", line));
        }
        const auto id = msg["id"].get<std::uint64_t>();
        auto it = pending.find(id);
        if (it == pending.end()) fail(MalformedResponseError("bridge response with unknown id", line));
        if (msg.contains("error")) {
            const auto text = msg["error"].is_string() ? msg["error"].get<std::string>() : msg["error"].dump();
            fail(RemoteError("bridge reported an error: " + text, line));
        }
        const auto& problem = problems[it->second];
        if (!msg.contains("sample") || !msg["sample"].is_array() || !msg.contains("energy") ||
            !msg["energy"].is_number()) {
            fail(MalformedResponseError("bridge response lacks sample or energy", line));
        }
        Bits bits;
        for (const auto& v : msg["sample"]) {
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                fail(MalformedResponseError("bridge sample contains a value other than 0 or 1", line));
            }
            bits.push_back(static_cast<std::uint8_t>(v.get<int>()));
        }
        if (bits.size() != problem.size) fail(MalformedResponseError("bridge sample has the wrong length", line));
        const double energy = problem.energy(bits);
        double scale = 1.0;
        for (const auto& e : problem.entries) scale += std::abs(e.value);
        if (std::abs(msg["energy"].get<double>() - energy) > 1e-9 * scale) {
            fail(MalformedResponseError("bridge energy does not match its sample", line));
        }
        results[it->second] = SampleSet({Sample{std::move(bits), energy}});
        pending.erase(it);
    };

    const auto timeout = std::chrono::duration<double>(timeout_);
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (!pending.empty()) {
        pollfd fds[2];
        nfds_t nfds = 0;
        fds[nfds++] = {from_child_, POLLIN, 0};
        if (written < out.size()) fds[nfds++] = {to_child_, POLLOUT, 0};
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) fail(TimeoutError("bridge did not answer within the timeout", buffer_));
        const int rc = ::poll(fds, nfds, static_cast<int>(left.count()));
        if (rc < 0) {
            if (errno == EINTR) continue;
            fail(TransportError(std::string("poll failed: ") + std::strerror(errno)));
        }
        if (rc == 0) fail(TimeoutError("bridge did not answer within the timeout", buffer_));
        if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            const ssize_t n = ::write(to_child_, out.data() + written, out.size() - written);
            if (n < 0 && errno != EAGAIN) {
                fail(TransportError(std::string("cannot write to the bridge: ") + std::strerror(errno)));
            }
            if (n > 0) written += static_cast<std::size_t>(n);
        }
        if (fds[0].revents & (POLLIN | POLLERR | POLLHUP)) {
            char chunk[4096];
            const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
            if (n == 0) fail(TransportError("bridge process closed its output", buffer_));
            if (n < 0 && errno != EAGAIN) {
                fail(TransportError(std::string("cannot read from the bridge: ") + std::strerror(errno)));
            }
            if (n > 0) {
                buffer_.append(chunk, static_cast<std::size_t>(n));
                deadline = std::chrono::steady_clock::now() + timeout;
                for (auto pos = buffer_.find('\n'); pos != std::string::npos; pos = buffer_.find('\n')) {
                    std::string line = buffer_.substr(0, pos);
                    buffer_.erase(0, pos + 1);
                    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                    handle(line);
                }
            }
        }
    }
    return results;
}

}  // namespace qafem

#pragma once

#include "optlab/json_io.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace optlab {

struct HttpResponse {
    int status = 200;
    Json body;
};

struct ServiceOptions {
    std::size_t benchmarkWorkers = 2;
    std::chrono::milliseconds solveTimeLimit{60000};
    long maxSolveIterations = 10000;
};

enum class JobStatus { Running, Done, Failed };
std::string_view to_string(JobStatus s);

/// Request handlers behind the HTTP API. Each returns a status code and a
/// JSON body; errors carry {"errors": [{"field", "message"}]}.
class Service {
public:
    explicit Service(ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    HttpResponse functions() const;
    HttpResponse methods() const;
    HttpResponse line_searches() const;
    HttpResponse defaults(const std::optional<std::string>& method) const;
    HttpResponse start_point(const std::optional<std::string>& function, const std::optional<std::string>& n) const;
    HttpResponse solve(const std::string& body) const;
    HttpResponse submit_benchmark(const std::string& body);
    HttpResponse benchmark_status(const std::string& id) const;

    /// Blocks until the job leaves the running state or the timeout passes.
    JobStatus wait_for(const std::string& id, std::chrono::milliseconds timeout) const;

    /// Registers the /api routes, plus static files under / when given.
    void mount(httplib::Server& server, const std::optional<std::string>& staticDir = std::nullopt);

private:
    struct Job {
        JobStatus status = JobStatus::Running;
        std::vector<RunRecord> records;
        std::string error;
    };

    void worker_loop();

    ServiceOptions options_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::condition_variable queued_;
    std::deque<std::function<void()>> queue_;
    std::map<std::string, Job> jobs_;
    long nextJob_ = 1;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

HttpResponse error_response(int status, const std::string& field, const std::string& message);

}  // namespace optlab

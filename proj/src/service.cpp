#include "optlab/service.hpp"

#include "optlab/functions.hpp"
#include "optlab/methods.hpp"
#include "optlab/solvers.hpp"

#include <httplib.h>

namespace optlab {

std::string_view to_string(JobStatus s) {
    switch (s) {
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "?";
}

HttpResponse error_response(int status, const std::string& field, const std::string& message) {
    return {status, {{"errors", Json::array({{{"field", field}, {"message", message}}})}}};
}

namespace {

HttpResponse from_config_error(const ConfigError& e) { return error_response(400, e.field(), e.detail()); }

// Maps library errors raised while validating a request.
HttpResponse from_error(const Error& e, const char* fieldHint) {
    switch (e.code()) {
        case ErrorCode::UnsupportedDerivative: return error_response(422, "methodName", e.what());
        case ErrorCode::UnknownMethod: return error_response(400, "methodName", e.what());
        case ErrorCode::UnknownFunction: return error_response(400, "function", e.what());
        case ErrorCode::UnknownLineSearch: return error_response(400, "rule", e.what());
        case ErrorCode::DimensionMismatch: return error_response(400, fieldHint, e.what());
        default: return error_response(400, fieldHint, e.what());
    }
}

std::optional<long> parse_long(const std::string& s) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (const std::logic_error&) {
        return std::nullopt;
    }
}

}  // namespace

Service::Service(ServiceOptions options) : options_(options) {
    const std::size_t n = std::max<std::size_t>(options_.benchmarkWorkers, 1);
    for (std::size_t i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    queued_.notify_all();
    for (auto& t : workers_) t.join();
}

void Service::worker_loop() {
    while (true) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            queued_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            task = std::move(queue_.front());
            queue_.pop_front();
        }
        task();
    }
}

HttpResponse Service::functions() const { return {200, functions_json()}; }

HttpResponse Service::methods() const { return {200, methods_json()}; }

HttpResponse Service::line_searches() const { return {200, line_searches_json()}; }

HttpResponse Service::defaults(const std::optional<std::string>& method) const {
    if (!method || method->empty()) return error_response(400, "method", "query parameter is required");
    try {
        return {200, defaults_json(*method)};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownMethod) return error_response(404, "method", e.what());
        throw;
    }
}

HttpResponse Service::start_point(const std::optional<std::string>& function,
                                  const std::optional<std::string>& n) const {
    if (!function || function->empty()) return error_response(400, "function", "query parameter is required");
    std::optional<FunctionSpec> spec;
    try {
        spec = function_spec(*function);
    } catch (const Error& e) {
        return error_response(404, "function", e.what());
    }
    Index dim = default_dimension(*spec, false);
    if (n) {
        const auto v = parse_long(*n);
        if (!v) return error_response(400, "n", "must be an integer");
        dim = *v;
    }
    try {
        return {200, {{"function", spec->name}, {"n", dim}, {"x0", to_json(starting_point(spec->name, dim))}}};
    } catch (const Error& e) {
        return error_response(400, "n", e.what());
    }
}

HttpResponse Service::solve(const std::string& body) const {
    Json req;
    try {
        req = Json::parse(body);
    } catch (const Json::parse_error& e) {
        return error_response(400, "body", std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!req.is_object()) return error_response(400, "body", "must be an object");
        const char* fKey = req.contains("functionName") ? "functionName" : "function";
        if (!req.contains(fKey) || !req[fKey].is_string()) return error_response(400, fKey, "is required");
        const std::string fname = req[fKey].get<std::string>();

        Json cfgJson = Json::object();
        for (const char* k : {"methodGroup", "methodName", "defaultMode", "lineSearch", "stopping", "extras"})
            if (req.contains(k)) cfgJson[k] = req[k];
        SolverConfig cfg = solver_config_from_json(cfgJson);
        if (cfg.stopping.maxIterNum > options_.maxSolveIterations) {
            return error_response(400, "maxIter",
                                  "synchronous solves allow at most " + std::to_string(options_.maxSolveIterations) +
                                      " iterations; use the benchmark API for larger budgets");
        }
        const SolverConfig resolved = resolve_config(cfg);
        const MethodInfo& info = method_info(resolved.methodName);

        const FunctionSpec spec = function_spec(fname);
        Index n = default_dimension(spec, info.derivativeOrder >= 2);
        const char* nKey = req.contains("n") ? "n" : (req.contains("dimension") ? "dimension" : nullptr);
        if (nKey) {
            const Json& jn = req[nKey];
            if (!jn.is_number_integer()) return error_response(400, nKey, "must be an integer");
            n = jn.get<Index>();
        }
        if (!spec.admits(n)) {
            return error_response(400, nKey ? nKey : "n",
                                  fname + " requires a dimension that is " + spec.dimension_constraint() +
                                      " and at least " + std::to_string(spec.minDimension));
        }
        Vector x0;
        if (req.contains("x0") && !req["x0"].is_null()) {
            x0 = vector_from_json(req["x0"], "x0");
            if (x0.size() != n) return error_response(400, "x0", "length must equal n = " + std::to_string(n));
        } else {
            x0 = starting_point(fname, n);
        }
        const Objective f = make_objective(fname, n);
        SolveOptions opts;
        opts.deadline = std::chrono::steady_clock::now() + options_.solveTimeLimit;
        const SolveReport rep = optlab::solve(f, x0, resolved, opts);
        return {200,
                {{"function", fname}, {"n", n}, {"x0", to_json(x0)}, {"config", to_json(resolved)},
                 {"report", to_json(rep)}}};
    } catch (const ConfigError& e) {
        return from_config_error(e);
    } catch (const Error& e) {
        return from_error(e, "n");
    }
}

HttpResponse Service::submit_benchmark(const std::string& body) {
    BenchConfig cfg;
    try {
        cfg = parse_bench_config(body);
        validate_matrix(cfg.solvers, cfg.problems);
    } catch (const ConfigError& e) {
        return from_config_error(e);
    } catch (const Error& e) {
        return from_error(e, "problems");
    }
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "job-" + std::to_string(nextJob_++);
        jobs_[id] = Job{};
        queue_.push_back([this, id, cfg = std::move(cfg)] {
            Job result;
            try {
                result.records = run_matrix(cfg.solvers, cfg.problems, cfg.stopping, 1);
                result.status = JobStatus::Done;
            } catch (const std::exception& e) {
                result.status = JobStatus::Failed;
                result.error = e.what();
            }
            {
                std::lock_guard inner(mutex_);
                jobs_[id] = std::move(result);
            }
            changed_.notify_all();
        });
    }
    queued_.notify_one();
    return {202, {{"id", id}, {"status", "running"}}};
}

HttpResponse Service::benchmark_status(const std::string& id) const {
    Job job;
    {
        std::lock_guard lock(mutex_);
        const auto it = jobs_.find(id);
        if (it == jobs_.end()) return error_response(404, "id", "unknown benchmark job '" + id + "'");
        job = it->second;
    }
    Json out = {{"id", id}, {"status", std::string(to_string(job.status))}};
    if (job.status == JobStatus::Done) {
        out["records"] = to_json(job.records);
        Json profiles = Json::object();
        for (MeasureKind k : kAllMeasures) profiles[std::string(to_string(k))] = to_json(performance_profile(job.records, k));
        out["profiles"] = profiles;
    } else if (job.status == JobStatus::Failed) {
        out["error"] = job.error;
    }
    return {200, out};
}

JobStatus Service::wait_for(const std::string& id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    auto status = [&] {
        const auto it = jobs_.find(id);
        return it == jobs_.end() ? JobStatus::Failed : it->second.status;
    };
    changed_.wait_for(lock, timeout, [&] { return status() != JobStatus::Running; });
    return status();
}

void Service::mount(httplib::Server& server, const std::optional<std::string>& staticDir) {
    auto send = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto param = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
        if (!req.has_param(key)) return std::nullopt;
        return req.get_param_value(key);
    };
    server.Get("/api/functions", [=, this](const httplib::Request&, httplib::Response& res) { send(res, functions()); });
    server.Get("/api/methods", [=, this](const httplib::Request&, httplib::Response& res) { send(res, methods()); });
    server.Get("/api/linesearches",
               [=, this](const httplib::Request&, httplib::Response& res) { send(res, line_searches()); });
    server.Get("/api/defaults", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, defaults(param(req, "method")));
    });
    server.Get("/api/startpoint", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, start_point(param(req, "function"), param(req, "n")));
    });
    server.Post("/api/solve",
                [=, this](const httplib::Request& req, httplib::Response& res) { send(res, solve(req.body)); });
    server.Post("/api/benchmark", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, submit_benchmark(req.body));
    });
    server.Get(R"(/api/benchmark/([A-Za-z0-9_-]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        send(res, benchmark_status(req.matches[1]));
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_response(500, "server", what).body.dump(), "application/json");
    });
    if (staticDir) server.set_mount_point("/", *staticDir);
}

}  // namespace optlab

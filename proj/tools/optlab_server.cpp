// HTTP front end: optlab_server --port 8080 --static DIR

#include "optlab/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"optlab HTTP service"};
    int port = 8080;
    std::string host = "0.0.0.0";
    std::optional<std::string> staticDir;
    std::size_t workers = 2;
    app.add_option("--port", port, "Listen port")->check(CLI::Range(1, 65535));
    app.add_option("--host", host, "Bind address");
    app.add_option("--static", staticDir, "Directory served under /");
    app.add_option("--bench-workers", workers, "Benchmark job threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    optlab::ServiceOptions opts;
    opts.benchmarkWorkers = workers;
    optlab::Service service(opts);
    httplib::Server server;
    service.mount(server, staticDir);
    std::cout << "listening on " << host << ":" << port << std::endl;
    if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ":" << port << '\n';
        return 1;
    }
    return 0;
}

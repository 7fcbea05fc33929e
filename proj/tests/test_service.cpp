#include "optlab/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace optlab;

namespace {

std::string first_field(const HttpResponse& r) { return r.body["errors"][0]["field"].get<std::string>(); }

const char* kTwoByTwo = R"({
    "solvers": ["BFGS", "GradientDescent"],
    "problems": [{"function": "ExtRosenbrock", "n": 2}, {"function": "Raydan1", "n": 4}],
    "stopping": {"maxIter": 20000}
})";

void check_monotone_profiles(const Json& profiles) {
    CHECK(profiles.size() == 3);
    for (auto it = profiles.begin(); it != profiles.end(); ++it) {
        for (auto c = it.value()["rho"].begin(); c != it.value()["rho"].end(); ++c) {
            double prev = 0.0;
            for (const auto& v : c.value()) {
                const double x = v.get<double>();
                CHECK(x >= prev);
                CHECK(x <= 1.0);
                prev = x;
            }
        }
    }
}

}  // namespace

TEST_CASE("catalog endpoints") {
    Service svc;
    const HttpResponse f = svc.functions();
    CHECK(f.status == 200);
    CHECK_FALSE(f.body.empty());
    bool found = false;
    for (const auto& e : f.body) {
        if (e["name"] == "ExtRosenbrock") {
            found = true;
            CHECK(e["dimensionConstraint"] == "even");
        }
        for (const char* k : {"name", "minDimension", "dimensionConstraint", "defaultDimension", "supports"})
            CHECK(e.contains(k));
    }
    CHECK(found);
    CHECK(f.body.dump() == svc.functions().body.dump());

    const HttpResponse m = svc.methods();
    CHECK(m.body["groups"].size() == 6);
    bool hz = false;
    for (const auto& e : m.body["groups"]["Conjugate Gradient"]) hz |= e["name"] == "CG_DESCENT";
    CHECK(m.body["groups"]["Conjugate Gradient"].size() == 5);
    CHECK(hz);
    for (const auto& [group, list] : m.body["groups"].items())
        for (const auto& e : list)
            if (e["name"] == "Dogleg") CHECK(e["usesLineSearch"] == false);
    CHECK(svc.line_searches().body.size() >= 10);
}

TEST_CASE("defaults endpoint") {
    Service svc;
    HttpResponse r = svc.defaults(std::string("CG_DESCENT"));
    CHECK(r.status == 200);
    CHECK(r.body["lineSearch"]["rule"] == "ApproxWolfe");
    CHECK(r.body.contains("stopping"));
    CHECK(svc.defaults(std::string("L-BFGS")).body["lineSearch"]["rule"] == "MoreThuente");
    r = svc.defaults(std::string("Nope"));
    CHECK(r.status == 404);
    CHECK(first_field(r) == "method");
    CHECK_FALSE(r.body["errors"][0]["message"].get<std::string>().empty());
    CHECK(svc.defaults(std::nullopt).status == 400);
}

TEST_CASE("startpoint endpoint") {
    Service svc;
    HttpResponse r = svc.start_point(std::string("ExtRosenbrock"), std::string("4"));
    CHECK(r.status == 200);
    CHECK(r.body["n"] == 4);
    CHECK(r.body["x0"] == Json::array({-1.2, 1.0, -1.2, 1.0}));
    CHECK(svc.start_point(std::string("ExtRosenbrock"), std::string("3")).status == 400);
    CHECK(svc.start_point(std::string("ExtRosenbrock"), std::string("x")).status == 400);
    CHECK(svc.start_point(std::string("Nope"), std::string("2")).status == 404);
    CHECK(svc.start_point(std::string("Raydan1"), std::string("7")).body["x0"].size() == 7);
}

TEST_CASE("solve endpoint") {
    Service svc;
    HttpResponse r = svc.solve(R"({"function": "ExtRosenbrock", "n": 2, "methodName": "BFGS", "defaultMode": true})");
    REQUIRE(r.status == 200);
    CHECK(r.body["report"]["terminationReason"] == "GradientTolerance");
    CHECK(r.body["x0"] == Json::array({-1.2, 1.0}));
    CHECK(r.body["config"]["lineSearch"]["rule"].is_string());
    CHECK(r.body["report"]["trace"]["functionValue"].size() ==
          r.body["report"]["iterations"].get<std::size_t>() + 1);

    // stateless: same request, same answer apart from cpu time
    HttpResponse again = svc.solve(R"({"functionName": "ExtRosenbrock", "dimension": 2, "methodName": "BFGS"})");
    REQUIRE(again.status == 200);
    r.body["report"].erase("cpuSeconds");
    again.body["report"].erase("cpuSeconds");
    CHECK(r.body["report"] == again.body["report"]);

    r = svc.solve(R"({"function": "ExtRosenbrock", "n": 2, "methodName": "GradientDescent", "defaultMode": false,
                      "lineSearch": {"rule": "Goldstein", "rho": 0.7}})");
    CHECK(r.status == 400);
    CHECK(first_field(r) == "rho");

    r = svc.solve(R"({"function": "ExtRosenbrock", "n": 2, "x0": [0.5, 0.5], "methodName": "BFGS"})");
    CHECK(r.body["x0"] == Json::array({0.5, 0.5}));

    // a gradient-only function has no Hessian for Newton
    std::string gradOnly;
    for (const auto& e : svc.functions().body)
        if (e["supports"]["hessian"] == false) gradOnly = e["name"];
    if (!gradOnly.empty()) {
        r = svc.solve(R"({"function": ")" + gradOnly + R"(", "methodName": "Newton"})");
        CHECK(r.status == 422);
        CHECK(first_field(r) == "methodName");
    }

    CHECK(first_field(svc.solve(R"({"function": "ExtRosenbrock", "methodName": "BFGS",
                                    "stopping": {"maxIter": 10001}})")) == "maxIter");
    CHECK(first_field(svc.solve(R"({"function": "ExtRosenbrock", "n": 3, "methodName": "BFGS"})")) == "n");
    CHECK(first_field(svc.solve(R"({"function": "ExtRosenbrock", "n": 2, "x0": [1], "methodName": "BFGS"})")) == "x0");
    CHECK(first_field(svc.solve(R"({"function": "Nope", "methodName": "BFGS"})")) == "function");
    CHECK(first_field(svc.solve(R"({"function": "ExtRosenbrock", "methodName": "Nope"})")) == "methodName");
    CHECK(first_field(svc.solve("not json")) == "body");
    CHECK(svc.solve("[]").status == 400);
}

TEST_CASE("solve with a user-supplied Hessian-free function returns 422") {
    FunctionSpec spec;
    spec.name = "SvcGradOnly";
    spec.minDimension = 1;
    spec.supports.hessian = false;
    spec.startingPoint = rules::constant(1.0);
    spec.formula = "sum x_i^2";
    register_function(spec, [](const Vector& x, const EvalRequest& r) {
        EvalResult out;
        if (r.value) out.value = x.squaredNorm();
        if (r.gradient) out.gradient = 2.0 * x;
        return out;
    });
    Service svc;
    const HttpResponse r = svc.solve(R"({"function": "SvcGradOnly", "n": 3, "methodName": "Newton"})");
    CHECK(r.status == 422);
    CHECK(first_field(r) == "methodName");
    CHECK(svc.solve(R"({"function": "SvcGradOnly", "n": 3, "methodName": "BFGS"})").status == 200);
}

TEST_CASE("benchmark jobs") {
    Service svc;
    const HttpResponse sub = svc.submit_benchmark(kTwoByTwo);
    REQUIRE(sub.status == 202);
    const std::string id = sub.body["id"];
    CHECK(sub.body["status"] == "running");
    bool seenDone = false;
    for (int i = 0; i < 2000; ++i) {
        const std::string st = svc.benchmark_status(id).body["status"];
        if (seenDone) CHECK(st == "done");
        seenDone = st == "done";
        if (seenDone && i > 3) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    CHECK(svc.wait_for(id, std::chrono::seconds(60)) == JobStatus::Done);
    const HttpResponse st = svc.benchmark_status(id);
    CHECK(st.body["status"] == "done");
    CHECK(st.body["records"].size() == 4);
    check_monotone_profiles(st.body["profiles"]);

    CHECK(svc.benchmark_status("job-999").status == 404);
    CHECK(svc.submit_benchmark("{").status == 400);
    CHECK(svc.submit_benchmark(R"({"solvers": ["Nope"], "problems": [{"function": "Raydan1", "n": 2}]})").status ==
          400);
    CHECK(svc.submit_benchmark(R"({"solvers": ["BFGS"], "problems": [{"function": "ExtRosenbrock", "n": 3}]})")
              .status == 400);
}

TEST_CASE("live HTTP server") {
    Service svc;
    httplib::Server server;
    svc.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(60, 0);
    auto res = cli.Get("/api/functions");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(Json::parse(res->body).size() >= 12);

    res = cli.Get("/api/methods");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["groups"].size() == 6);
    res = cli.Get("/api/linesearches");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = cli.Get("/api/defaults?method=CG_DESCENT");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["lineSearch"]["rule"] == "ApproxWolfe");
    res = cli.Get("/api/defaults?method=Nope");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = cli.Get("/api/startpoint?function=ExtRosenbrock&n=4");
    REQUIRE(res);
    CHECK(Json::parse(res->body)["x0"] == Json::array({-1.2, 1.0, -1.2, 1.0}));

    res = cli.Post("/api/solve", R"({"function": "ExtRosenbrock", "n": 2, "methodName": "BFGS"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(Json::parse(res->body)["report"]["terminationReason"] == "GradientTolerance");
    res = cli.Post("/api/solve", R"({"function": "ExtRosenbrock", "n": 2, "methodName": "GradientDescent",
                                     "lineSearch": {"rule": "Goldstein", "rho": 0.7}})",
                   "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = cli.Post("/api/benchmark", kTwoByTwo, "application/json");
    REQUIRE(res);
    CHECK(res->status == 202);
    const std::string id = Json::parse(res->body)["id"];
    svc.wait_for(id, std::chrono::seconds(60));
    res = cli.Get("/api/benchmark/" + id);
    REQUIRE(res);
    const Json st = Json::parse(res->body);
    CHECK(st["status"] == "done");
    CHECK(st["records"].size() == 4);
    res = cli.Get("/api/benchmark/job-424242");
    REQUIRE(res);
    CHECK(res->status == 404);

    server.stop();
    th.join();
}

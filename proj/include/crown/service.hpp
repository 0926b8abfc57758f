#pragma once

#include <crown/pipeline.hpp>

#include <string>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace crown::service {

struct Response {
    int status = 200;
    nlohmann::json body;
};

/// Stateless request handlers over a shared Engine. Every answer depends only
/// on the request body and the loaded artifacts, apart from `timing_ms`.
class Service {
public:
    explicit Service(const Engine& engine, std::string version = CROWN_VERSION);

    /// POST /answer. 400 with {"error", "field"} on invalid input, 500 on
    /// engine failure.
    Response answer(const std::string& request_body) const;
    /// GET /defaults
    nlohmann::json defaults() const;
    /// GET /health
    nlohmann::json health() const;

private:
    const Engine& engine_;
    std::string version_;
};

/// Registers /answer, /defaults and /health with CORS headers on `server`.
/// When `ui_dir` is non-empty it is served as static content at "/".
void mount(httplib::Server& server, const Service& service, const std::string& ui_dir = {});

} // namespace crown::service

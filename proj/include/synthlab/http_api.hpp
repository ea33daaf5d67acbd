#pragma once

#include <memory>
#include <string>

#include "synthlab/service.hpp"

namespace synthlab {

/// Maps an error code to the HTTP status the API answers with.
int http_status(ErrorCode code);

/// HTTP/1.1 + JSON front end for a SynthesisService. Routes are listed in
/// docs/http-api.md.
class HttpApi {
public:
    explicit HttpApi(SynthesisService& service);
    ~HttpApi();

    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws Error{BindError}.
    int start(const std::string& host, int port);

    /// Binds and serves on the calling thread until stop() is called.
    void run(const std::string& host, int port);

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace synthlab

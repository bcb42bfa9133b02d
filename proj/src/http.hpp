#pragma once

#include <chrono>
#include <string>

namespace pddlkit::detail {

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// POSTs a JSON body to `base_url` + `path`. `base_url` may carry a path
/// prefix ("https://host/v1"). Throws BackendError when no response arrives.
HttpResponse post_json(const std::string& base_url, const std::string& path, const std::string& body,
                       const std::string& bearer_token, std::chrono::seconds timeout);

}  // namespace pddlkit::detail

#include "http.hpp"

#ifdef PDDLKIT_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "pddlkit/llm.hpp"

namespace pddlkit::detail {

HttpResponse post_json(const std::string& base_url, const std::string& path, const std::string& body,
                       const std::string& bearer_token, std::chrono::seconds timeout) {
    // Split "scheme://host[:port][/prefix]".
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw BackendError("base URL lacks a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    const std::string origin = base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client cli(origin);
    if (!cli.is_valid()) throw BackendError("unsupported URL (TLS support missing?): " + base_url);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);

    auto res = cli.Post(prefix + path, headers, body, "application/json");
    if (!res) throw BackendError("request to " + base_url + path + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

}  // namespace pddlkit::detail

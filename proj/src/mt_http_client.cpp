#include <json.hpp>
#include <httplib.h>

#include "wsd/augmentation.hpp"
#include "wsd/errors.hpp"

namespace wsd {

namespace {

class HttpMtClient : public MtClient {
public:
    explicit HttpMtClient(std::string endpoint) : endpoint_(std::move(endpoint)) {}

    std::string translate(const std::string& text, const std::string& src,
                          const std::string& tgt) override {
        httplib::Client cli(endpoint_);
        cli.set_connection_timeout(5, 0);
        cli.set_read_timeout(30, 0);
        nlohmann::json body{{"text", text}, {"src", src}, {"tgt", tgt}};
        auto res = cli.Post("/translate", body.dump(), "application/json");
        std::string hop = src + "->" + tgt;
        if (!res) throw MtUnavailableError(hop, httplib::to_string(res.error()));
        if (res->status != 200)
            throw MtUnavailableError(hop, "HTTP " + std::to_string(res->status));
        try {
            auto j = nlohmann::json::parse(res->body);
            return j.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw MtMalformedResponseError(std::string("bad MT response: ") + e.what());
        }
    }

private:
    std::string endpoint_;
};

}  // namespace

std::unique_ptr<MtClient> make_http_mt_client(const std::string& endpoint) {
    return std::make_unique<HttpMtClient>(endpoint);
}

}  // namespace wsd

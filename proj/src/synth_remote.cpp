#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "schemashift/errors.hpp"
#include "schemashift/synth.hpp"

namespace schemashift {

namespace {

class SlotGuard {
public:
    SlotGuard(std::mutex& mu, std::condition_variable& cv, int& in_flight, int limit)
        : mu_(mu), cv_(cv), in_flight_(in_flight) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return in_flight_ < limit; });
        ++in_flight_;
    }
    ~SlotGuard() {
        {
            std::lock_guard lock(mu_);
            --in_flight_;
        }
        cv_.notify_one();
    }

private:
    std::mutex& mu_;
    std::condition_variable& cv_;
    int& in_flight_;
};

}  // namespace

RemoteSynthesizer::RemoteSynthesizer(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.max_in_flight < 1) throw InvalidArgument("max_in_flight must be positive");
    if (cfg_.max_attempts < 1) throw InvalidArgument("max_attempts must be positive");
    if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
}

std::string RemoteSynthesizer::complete(const std::string& prompt) {
    if (api_key_.empty()) throw BackendUnavailable("environment variable " + cfg_.api_key_env + " is not set");

    nlohmann::json body = {
        {"model", cfg_.model},
        {"temperature", 0},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    const std::string payload = body.dump();

    SlotGuard slot(mu_, slot_free_, in_flight_, cfg_.max_in_flight);
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    client.set_bearer_token_auth(api_key_);

    auto backoff = cfg_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        auto res = client.Post(cfg_.path, payload, "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
                throw Timeout("synthesis request timed out: " + httplib::to_string(err));
            throw BackendUnavailable("synthesis request failed: " + httplib::to_string(err));
        }
        const bool transient = res->status == 429 || res->status >= 500;
        if (transient && attempt < cfg_.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
            continue;
        }
        if (res->status != 200)
            throw BackendUnavailable("synthesis endpoint answered HTTP " + std::to_string(res->status));

        const auto reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) throw MalformedProposal("endpoint reply is not JSON", res->body);
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw MalformedProposal("endpoint reply has no message content", res->body);
        }
    }
}

SynthResponse RemoteSynthesizer::propose(const SynthRequest& request) {
    return parse_proposal(request.kind, complete(render_prompt(request)));
}

}  // namespace schemashift

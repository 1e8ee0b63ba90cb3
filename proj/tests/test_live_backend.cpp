/* Copyright 2026 CDM Pipeline Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cdm/llm.hpp"
#include "cdm/prompt.hpp"

using namespace cdm;
using nlohmann::json;

namespace {

/// Local chat-completions stand-in; the handler decides each response.
class TestServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit TestServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   ++hits_;
                   handler_(req, res);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~TestServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_.load(); }

 private:
  httplib::Server server_;
  Handler handler_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
};

LlmRequest sample_request() {
  return LlmRequest{"test-model",
                    build_prompt(ScenarioKind::PrimaryPolarity, "Great food.", nullptr, false),
                    0.2, 0};
}

LiveConfig fast_config(const std::string& endpoint) {
  LiveConfig config;
  config.endpoint = endpoint;
  config.api_key = "sk-test";
  config.max_attempts = 3;
  config.backoff_base = std::chrono::milliseconds(5);
  config.timeout = std::chrono::seconds(5);
  return config;
}

void respond_ok(httplib::Response& res, const std::string& content) {
  res.set_content(
      json{{"choices", json::array({json{{"message", json{{"role", "assistant"},
                                                          {"content", content}}}}})}}
          .dump(),
      "application/json");
}

}  // namespace

TEST_CASE("live backend posts the chat-completions payload and reads the reply") {
  std::string seen_body;
  std::string seen_auth;
  TestServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    seen_auth = req.get_header_value("Authorization");
    respond_ok(res, "positive");
  });

  LiveBackend backend(fast_config(server.endpoint()));
  const auto result = backend.complete(sample_request());
  REQUIRE(ok(result));
  CHECK(response(result).text == "positive");
  CHECK(response(result).backend == BackendKind::Live);
  CHECK(seen_auth == "Bearer sk-test");

  const json body = json::parse(seen_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == doctest::Approx(0.2));
  REQUIRE(body["messages"].size() == 1);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"].get<std::string>().find("Great food.") !=
        std::string::npos);
}

TEST_CASE("temperature is omitted from the payload when unset") {
  std::string seen_body;
  TestServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_body = req.body;
    respond_ok(res, "neutral");
  });
  LiveBackend backend(fast_config(server.endpoint()));
  LlmRequest request = sample_request();
  request.temperature.reset();
  REQUIRE(ok(backend.complete(request)));
  CHECK_FALSE(json::parse(seen_body).contains("temperature"));
}

TEST_CASE("rate limits are retried with backoff until they clear") {
  std::atomic<int> calls{0};
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
    } else {
      respond_ok(res, "positive");
    }
  });
  LiveBackend backend(fast_config(server.endpoint()));
  const auto result = backend.complete(sample_request());
  REQUIRE(ok(result));
  CHECK(server.hits() == 3);
}

TEST_CASE("persistent rate limiting fails after the attempt budget") {
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
    res.set_content("nope", "text/plain");
  });
  LiveBackend backend(fast_config(server.endpoint()));
  const auto result = backend.complete(sample_request());
  REQUIRE_FALSE(ok(result));
  CHECK(error(result).cls == LlmErrorClass::RateLimit);
  CHECK(server.hits() == 3);
}

TEST_CASE("server errors retry, client errors do not") {
  SUBCASE("500s retry") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
    });
    LiveBackend backend(fast_config(server.endpoint()));
    const auto result = backend.complete(sample_request());
    REQUIRE_FALSE(ok(result));
    CHECK(error(result).cls == LlmErrorClass::Transport);
    CHECK(server.hits() == 3);
  }

  SUBCASE("auth failures surface immediately") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
      res.status = 401;
      res.set_content("{\"error\": \"bad key\"}", "application/json");
    });
    LiveBackend backend(fast_config(server.endpoint()));
    const auto result = backend.complete(sample_request());
    REQUIRE_FALSE(ok(result));
    CHECK(error(result).cls == LlmErrorClass::Provider);
    CHECK(error(result).status == 401);
    CHECK(server.hits() == 1);
  }
}

TEST_CASE("malformed completion payloads are provider errors") {
  TestServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  LiveBackend backend(fast_config(server.endpoint()));
  const auto result = backend.complete(sample_request());
  REQUIRE_FALSE(ok(result));
  CHECK(error(result).cls == LlmErrorClass::Provider);
}

TEST_CASE("unreachable endpoints are transport errors") {
  LiveConfig config = fast_config("http://127.0.0.1:1/v1/chat/completions");
  config.max_attempts = 2;
  LiveBackend backend(config);
  const auto result = backend.complete(sample_request());
  REQUIRE_FALSE(ok(result));
  CHECK(error(result).cls == LlmErrorClass::Transport);
}

TEST_CASE("misconfiguration is reported without touching the network") {
  LiveConfig config;
  LiveBackend backend(config);
  const auto result = backend.complete(sample_request());
  REQUIRE_FALSE(ok(result));
  CHECK(error(result).cls == LlmErrorClass::Config);

  LiveConfig no_scheme = fast_config("not-a-url");
  LiveBackend broken(no_scheme);
  const auto bad = broken.complete(sample_request());
  REQUIRE_FALSE(ok(bad));
  CHECK(error(bad).cls == LlmErrorClass::Config);
}

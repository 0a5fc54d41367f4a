// Copyright 2026 the xdial authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xdial/session_server.hpp"

#include "httplib.h"

namespace xdial::api {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void answer(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    answer(res, 200, f());
  } catch (const ApiError& e) {
    answer(res, e.status(), error_body(e));
  } catch (const std::exception& e) {
    const ApiError wrapped(500, e.what());
    answer(res, 500, error_body(wrapped));
  }
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ApiError(400, std::string("body is not JSON: ") + e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  SessionManager& sessions;
  httplib::Server server;
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(new Impl{sessions, {}}) {
  auto& srv = impl_->server;
  auto& mgr = impl_->sessions;
  srv.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.open_session(body_of(req)); });
  });
  srv.Post(R"(/sessions/([^/]+)/turn)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.post_turn(req.matches[1], body_of(req)); });
  });
  srv.Get(R"(/sessions/([^/]+)/state)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.state(req.matches[1]); });
  });
  srv.Get(R"(/sessions/([^/]+)/export)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return mgr.export_session(req.matches[1]); });
  });
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const ApiError e(res.status, "no route for " + req.method + " " + req.path);
    answer(res, res.status, error_body(e));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace xdial::api

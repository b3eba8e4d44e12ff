// Copyright 2026 The banglanlu Authors.
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

// cpp-httplib transport for the gateway.

#include "banglanlu/errors.hpp"
#include "banglanlu/gateway.hpp"
#include "httplib.h"

namespace bnlu {

void serve(Gateway& gateway, const std::string& host, int port) {
  httplib::Server server;
  const auto forward = [&gateway](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse out = gateway.handle(req.method, req.path, req.body);
    res.status = out.status;
    if (out.status != 204) res.set_content(out.body, out.content_type);
  };
  // The tester console may be served from another origin.
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get(R"(.*)", forward);
  server.Post(R"(.*)", forward);
  if (!server.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  server.listen_after_bind();
}

}  // namespace bnlu

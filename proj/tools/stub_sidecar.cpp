// Fixture-driven stand-in for the neural-metric sidecar.
#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "stub_servers.hpp"

namespace {
httplib::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cneval stub sidecar"};
  std::string host = "127.0.0.1";
  int port = 0;
  std::string fixture;
  bool only_bertscore = false;
  std::optional<double> fixed;
  app.add_option("--host", host);
  app.add_option("--port", port, "0 picks a free port");
  app.add_option("--fixture", fixture, "JSON behaviour file")->check(CLI::ExistingFile);
  app.add_flag("--only-bertscore", only_bertscore);
  app.add_option("--fixed", fixed, "return this value for every pair");
  CLI11_PARSE(app, argc, argv);

  cneval::stub::SidecarBehaviour behaviour;
  if (!fixture.empty()) {
    std::ifstream in(fixture);
    behaviour = cneval::stub::SidecarBehaviour::from_json(nlohmann::json::parse(in));
  }
  if (only_bertscore) behaviour.metrics = {"bertscore"};
  if (fixed) behaviour.fixed_value = fixed;

  httplib::Server server;
  g_server = &server;
  server.Get("/v1/health", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(nlohmann::json{{"status", "ok"}, {"metrics", behaviour.metrics}}.dump(),
                    "application/json");
  });
  server.Post("/v1/score", [&](const httplib::Request& req, httplib::Response& res) {
    auto [status, body] =
        cneval::stub::sidecar_response(behaviour, nlohmann::json::parse(req.body, nullptr, false));
    res.status = status;
    res.set_content(body.dump(), "application/json");
  });
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  std::cout << "listening on " << host << ":" << bound << std::endl;
  server.listen_after_bind();
  return 0;
}

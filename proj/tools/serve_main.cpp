// repurpose-serve: HTTP service over the pipeline engine.

#include "repurpose/service/server.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

using namespace repurpose;

namespace {
service::Server* g_server = nullptr;
extern "C" void on_signal(int)
{
    if (g_server)
        g_server->stop();
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Prop repurposing HTTP service"};
    std::string config_path;
    int port = -1;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--port", port, "override the listen port");
    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = service::load_service_config(config_path.empty() ? std::nullopt
                                                                    : std::optional<std::filesystem::path>(config_path));
        if (port >= 0)
            cfg.port = port;
        service::Server server(cfg);
        const int bound = server.bind();
        std::cerr << "listening on " << server.config().host << ":" << bound << " root=" << cfg.root.string() << "\n";
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        server.run();
        g_server = nullptr;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

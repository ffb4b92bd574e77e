#include "service.hpp"

#include <chrono>
#include <ostream>

#include <json.hpp>

#include "ambigate/errors.hpp"
#include "commands.hpp"

namespace ambigate {

namespace {

using nlohmann::ordered_json;

void send_json(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    ordered_json j;
    j["error"] = message;
    send_json(res, status, j);
}

}  // namespace

GateService::GateService(const AppConfig& config) : pipeline_(GatePipeline::open(config)) {
    // SO_REUSEADDR only: allow rebinding a TIME_WAIT port, but fail loudly
    // when another server already listens there (the library default adds
    // SO_REUSEPORT, which would split traffic between two instances)
    server_.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
                   sizeof(yes));
    });
    setup_routes();
}

GateService::~GateService() { stop(); }

void GateService::setup_routes() {
    server_.Post("/v1/gate", [this](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            return send_error(res, 422, "request body must be a JSON object");
        }
        for (const auto& item : body.items()) {
            if (item.key() != "id" && item.key() != "text" && item.key() != "context") {
                return send_error(res, 422, "unknown field '" + item.key() + "'");
            }
        }
        if (!body.contains("text") || !body["text"].is_string()) {
            return send_error(res, 422, "field 'text' (string) is required");
        }
        const std::string text = body["text"].get<std::string>();
        if (trim_copy(text).empty()) {
            return send_error(res, 422, "field 'text' must be non-empty");
        }
        std::string id = "request";
        if (body.contains("id")) {
            if (!body["id"].is_string()) return send_error(res, 422, "field 'id' must be a string");
            id = body["id"].get<std::string>();
        }
        std::optional<std::string> context;
        if (body.contains("context")) {
            if (!body["context"].is_string()) {
                return send_error(res, 422, "field 'context' must be a string");
            }
            context = body["context"].get<std::string>();
        }

        try {
            const ClassifyOutcome outcome = pipeline_.classify_text(id, text, context);
            ordered_json j;
            j["id"] = id;
            j["klass"] = to_string(outcome.decision.klass);
            j["p_ambiguous"] = outcome.decision.p_ambiguous;
            j["p_nonambiguous"] = outcome.decision.p_nonambiguous;
            j["nc_ambiguous"] = outcome.decision.nc_ambiguous;
            j["nc_nonambiguous"] = outcome.decision.nc_nonambiguous;
            ordered_json scores = ordered_json::array();
            for (const auto& v : outcome.profile.verdicts) scores.push_back(v.score);
            j["scores"] = std::move(scores);
            j["mean"] = outcome.profile.mean;
            j["variance"] = outcome.profile.variance;
            if (outcome.decision.feedback) j["feedback"] = *outcome.decision.feedback;
            send_json(res, 200, j);
        } catch (const BackendUnavailable& e) {
            send_error(res, 503, e.what());
        } catch (const EvaluatorFailed& e) {
            send_error(res, 503, e.what());
        } catch (const InvariantViolation& e) {
            send_error(res, 422, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
        const AppConfig& config = pipeline_.config();
        ordered_json j;
        j["status"] = "ok";
        j["calibration_fingerprint"] = pipeline_.calibration_fingerprint();
        j["calibration_examples"] = pipeline_.calibration().examples().size();
        j["alpha"] = config.conformal.alpha;
        j["beta"] = config.conformal.beta;
        j["stub_mode"] = config.stub_mode;
        j["model"] = config.backend.model_name;
        j["base_url"] = config.backend.base_url;
        j["api_key"] = config.backend.api_key ? ordered_json("<redacted>") : ordered_json(nullptr);
        send_json(res, 200, j);
    });
}

bool GateService::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_.bind_to_any_port(host);
        if (port_ < 0) return false;
    } else {
        if (!server_.bind_to_port(host, port)) return false;
        port_ = port;
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    for (int i = 0; i < 2000 && !server_.is_running(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    return server_.is_running();
}

void GateService::stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
}

void GateService::join() {
    if (thread_.joinable()) thread_.join();
}

int cmd_serve(const AppConfig& config, const std::string& host, int port, std::ostream& out,
              std::ostream& err) {
    try {
        GateService service(config);
        if (!service.start(host, port)) {
            err << "error: cannot bind " << host << ":" << port << "\n";
            return kExitOperationalError;
        }
        out << "listening on http://" << host << ":" << service.port() << "\n" << std::flush;
        service.join();
        return kExitNonAmbiguous;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitOperationalError;
    }
}

}  // namespace ambigate

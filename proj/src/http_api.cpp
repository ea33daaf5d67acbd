#include "synthlab/http_api.hpp"

#include <thread>

#include "httplib.h"

#include "synthlab/analyze.hpp"
#include "synthlab/distill.hpp"
#include "synthlab/synthesize.hpp"

namespace synthlab {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownAnnotation:
        case ErrorCode::UnknownGroup:
        case ErrorCode::UnknownEntity:
        case ErrorCode::UnknownDocument:
            return 404;
        case ErrorCode::GroupArchived:
        case ErrorCode::SameGroup:
            return 409;
        case ErrorCode::AuthError:
        case ErrorCode::TransportError:
            return 502;
        case ErrorCode::CorruptLog:
            return 503;
        case ErrorCode::MalformedLog:
        case ErrorCode::DataDirError:
        case ErrorCode::BindError:
            return 500;
        default:
            return 400;
    }
}

namespace {

using Request = httplib::Request;
using Response = httplib::Response;

void send_json(Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, int status, ErrorCode code, const std::string& message) {
    send_json(res, status, Json{{"error", to_string(code)}, {"message", message}});
}

Json parse_body(const Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::InvalidRequest, std::string("request body is not JSON: ") + e.what());
    }
}

template <class T>
T field(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end()) throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + key + "'");
    try {
        return it->template get<T>();
    } catch (const Json::exception&) {
        throw Error(ErrorCode::InvalidRequest, std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T field_or(const Json& body, const char* key, T fallback) {
    if (!body.is_object() || !body.contains(key) || body[key].is_null()) return fallback;
    return field<T>(body, key);
}

using Strings = std::vector<std::string>;

Json referrer_json(const Referrer& r) {
    return Json{{"kind", r.kind == ReferrerKind::note ? "note" : "document"},
                {"id", r.id},
                {"created_at", format_timestamp(r.created_at)}};
}

std::multimap<std::string, std::string> params_of(const Request& req) {
    return {req.params.begin(), req.params.end()};
}

}  // namespace

struct HttpApi::Impl {
    SynthesisService& service;
    httplib::Server server;
    std::thread thread;

    explicit Impl(SynthesisService& s) : service(s) { install_routes(); }

    using Handler = std::function<void(const Request&, Response&)>;

    /// Wraps a handler so that domain errors become JSON error responses.
    static httplib::Server::Handler guarded(Handler handler) {
        return [handler = std::move(handler)](const Request& req, Response& res) {
            try {
                handler(req, res);
            } catch (const Error& e) {
                send_error(res, http_status(e.code()), e.code(), e.what());
            } catch (const nlohmann::json::exception& e) {
                send_error(res, 400, ErrorCode::InvalidRequest, e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, ErrorCode::InvalidRequest, e.what());
            }
        };
    }

    void install_routes() {
        auto& s = service;

        server.Get("/health", guarded([](const Request&, Response& res) { send_json(res, 200, {{"status", "ok"}}); }));

        server.Get("/sessions", guarded([&s](const Request&, Response& res) {
            Json quarantined = Json::array();
            for (const auto& q : s.quarantined()) quarantined.push_back({{"id", q.id}, {"reason", q.reason}});
            send_json(res, 200, {{"sessions", s.session_ids()}, {"quarantined", quarantined}});
        }));

        server.Post("/sessions", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            auto id = s.create_session(field_or<std::string>(body, "owner", ""),
                                       field_or<Strings>(body, "source_uris", {}));
            s.read(id, [&](const Session& session) { send_json(res, 201, state_to_json(session.state())); });
        }));

        server.Get(R"(/sessions/([^/]+))", guarded([&s](const Request& req, Response& res) {
            s.read(req.matches[1], [&](const Session& session) { send_json(res, 200, state_to_json(session.state())); });
        }));

        server.Post(R"(/sessions/([^/]+)/ingest)", guarded([&s](const Request& req, Response& res) {
            std::string id = req.matches[1];
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::parse_error& e) {
                throw Error(ErrorCode::InvalidRequest, std::string("request body is not JSON: ") + e.what());
            }
            std::vector<Annotation> annotations;
            std::string origin;
            if (body.is_array() || body.contains("fixture")) {
                origin = "fixture";
                annotations = parse_fixture(body.is_array() ? body : body["fixture"]);
            } else {
                if (!body.is_object() || !body.contains("source_uri") || !body["source_uri"].is_string()) {
                    throw Error(ErrorCode::InvalidRequest, "ingest needs 'source_uri' or 'fixture'");
                }
                origin = body["source_uri"].get<std::string>();
                s.read(id, [](const Session&) { return 0; });  // 404 before touching the network
                try {
                    annotations = fetch_annotations(s.config().ingest, origin);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::SchemaError || e.code() == ErrorCode::ConfigError) {
                        send_error(res, 502, e.code(), e.what());
                        return;
                    }
                    throw;
                }
            }
            auto result = s.write(id, [&](Session& session) {
                return ingest_annotations(session, origin, std::move(annotations));
            });
            send_json(res, 200, {{"received", result.received}, {"added", result.added}});
        }));

        server.Get(R"(/sessions/([^/]+)/annotations)", guarded([&s](const Request& req, Response& res) {
            auto query = query_from_params(params_of(req));
            s.read(req.matches[1], [&](const Session& session) {
                auto hits = apply_filter(session.state().annotations.items(), query);
                send_json(res, 200, {{"query", query}, {"count", hits.size()}, {"annotations", hits}});
            });
        }));

        server.Post(R"(/sessions/([^/]+)/filters)", guarded([&s](const Request& req, Response& res) {
            auto query = parse_body(req).get<FilterQuery>();
            s.write(req.matches[1], [&](Session& session) {
                const auto& event = record_filter(session, query);
                auto hits = apply_filter(session.state().annotations.items(), event.as<events::FilterApplied>()->query);
                send_json(res, 200, {{"event", event}, {"count", hits.size()}, {"annotations", hits}});
            });
        }));

        server.Post(R"(/sessions/([^/]+)/groups)", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 201,
                          create_group(session, field_or<std::string>(body, "label", ""),
                                       field_or<std::string>(body, "description", "")));
            });
        }));

        server.Post(R"(/sessions/([^/]+)/groups/([^/]+)/assign)", guarded([&s](const Request& req, Response& res) {
            auto annotation = field<std::string>(parse_body(req), "annotation_id");
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 200, assign(session, annotation, req.matches[2]));
            });
        }));

        server.Post(R"(/sessions/([^/]+)/groups/([^/]+)/remove)", guarded([&s](const Request& req, Response& res) {
            auto annotation = field<std::string>(parse_body(req), "annotation_id");
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 200, remove(session, annotation, req.matches[2]));
            });
        }));

        server.Post(R"(/sessions/([^/]+)/transfers)", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            auto annotation = field<std::string>(body, "annotation_id");
            auto from = field<std::string>(body, "from_group_id");
            auto to = field<std::string>(body, "to_group_id");
            s.write(req.matches[1], [&](Session& session) {
                auto [from_group, to_group] = transfer(session, annotation, from, to);
                send_json(res, 200, {{"from", from_group}, {"to", to_group}});
            });
        }));

        server.Post(R"(/sessions/([^/]+)/merges)", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            auto ids = field<Strings>(body, "group_ids");
            auto label = field_or<std::string>(body, "label", "");
            auto description = field_or<std::string>(body, "description", "");
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 201, merge(session, ids, label, description));
            });
        }));

        server.Post(R"(/sessions/([^/]+)/notes)", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            auto text = field_or<std::string>(body, "text", "");
            auto annotations = field_or<Strings>(body, "annotation_ids", {});
            auto groups = field_or<Strings>(body, "group_ids", {});
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 201, add_note(session, text, annotations, groups));
            });
        }));

        server.Post(R"(/sessions/([^/]+)/notes/([^/]+)/links)", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            auto annotations = field_or<Strings>(body, "annotation_ids", {});
            auto groups = field_or<Strings>(body, "group_ids", {});
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 200, link_note(session, req.matches[2], annotations, groups));
            });
        }));

        server.Get(R"(/sessions/([^/]+)/entities/([^/]+)/backlinks)",
                   guarded([&s](const Request& req, Response& res) {
                       std::string entity = req.matches[2];
                       s.read(req.matches[1], [&](const Session& session) {
                           Json list = Json::array();
                           for (const auto& r : backlinks(session.state(), entity)) list.push_back(referrer_json(r));
                           send_json(res, 200,
                                     {{"entity_id", entity},
                                      {"kind", to_string(*session.state().entity_kind(entity))},
                                      {"backlinks", list}});
                       });
                   }));

        server.Post(R"(/sessions/([^/]+)/documents)", guarded([&s](const Request& req, Response& res) {
            auto body = parse_body(req);
            auto level_text = field<std::string>(body, "level");
            auto level = parse_document_level(level_text);
            if (!level) throw Error(ErrorCode::InvalidRequest, "unknown document level '" + level_text + "'");
            auto source = body.contains("source_uri") && !body["source_uri"].is_null()
                              ? std::optional<std::string>(field<std::string>(body, "source_uri"))
                              : std::nullopt;
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 201, create_document(session, *level, source));
            });
        }));

        server.Get(R"(/sessions/([^/]+)/documents/([^/]+))", guarded([&s](const Request& req, Response& res) {
            std::string doc = req.matches[2];
            s.read(req.matches[1], [&](const Session& session) {
                const auto* d = session.state().documents.find(doc);
                if (!d) throw Error(ErrorCode::UnknownDocument, "unknown document " + doc);
                send_json(res, 200, *d);
            });
        }));

        server.Put(R"(/sessions/([^/]+)/documents/([^/]+))", guarded([&s](const Request& req, Response& res) {
            auto body = field<std::string>(parse_body(req), "body");
            s.write(req.matches[1], [&](Session& session) {
                send_json(res, 200, edit_document(session, req.matches[2], body));
            });
        }));

        server.Get(R"(/sessions/([^/]+)/documents/([^/]+)/export)", guarded([&s](const Request& req, Response& res) {
            auto format_text = req.has_param("format") ? req.get_param_value("format") : "markdown";
            auto format = parse_export_format(format_text);
            if (!format) throw Error(ErrorCode::InvalidRequest, "unknown export format '" + format_text + "'");
            std::string doc = req.matches[2];
            s.read(req.matches[1], [&](const Session& session) {
                res.status = 200;
                res.set_content(export_document(session.state(), doc, *format),
                                *format == ExportFormat::markdown ? "text/markdown; charset=utf-8"
                                                                  : "text/html; charset=utf-8");
            });
        }));

        server.Get(R"(/sessions/([^/]+)/analytics)", guarded([&s](const Request& req, Response& res) {
            s.read(req.matches[1], [&](const Session& session) {
                send_json(res, 200,
                          {{"strategy", to_json(analyze_log(session.events(), s.config().strategy_thresholds))},
                           {"iteration", to_json(iteration_metrics(session.events()))}});
            });
        }));

        server.Get(R"(/sessions/([^/]+)/events)", guarded([&s](const Request& req, Response& res) {
            std::uint64_t since = 0;
            if (req.has_param("since")) {
                try {
                    since = std::stoull(req.get_param_value("since"));
                } catch (const std::exception&) {
                    throw Error(ErrorCode::InvalidRequest, "since must be a non-negative integer");
                }
            }
            s.read(req.matches[1], [&](const Session& session) {
                Json list = Json::array();
                for (const auto& e : session.events()) {
                    if (e.seq > since) list.push_back(e);
                }
                send_json(res, 200, {{"events", list}});
            });
        }));
    }
};

HttpApi::HttpApi(SynthesisService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::start(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::BindError, "cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpApi::run(const std::string& host, int port) {
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::BindError, "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->server.listen_after_bind();
}

void HttpApi::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace synthlab

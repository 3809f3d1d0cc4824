#include "dzn/daemon.hpp"
#include "dzn/frontend.hpp"
#include "dzn/verify.hpp"

#include <httplib.h>

#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace dzn::daemon {

namespace {

Json loc_json(const SourceLoc& loc) { return {{"file", loc.file}, {"line", loc.line}, {"col", loc.column}}; }

struct HttpError {
    int status;
    Json body;
};

HttpError error(int status, const std::string& message) { return {status, {{"error", message}}}; }

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        Json j = Json::parse(req.body);
        if (!j.is_object()) throw error(400, "request body must be a JSON object");
        return j;
    } catch (const Json::parse_error& e) {
        throw error(400, std::string("invalid JSON: ") + e.what());
    }
}

std::vector<std::string> string_list(const Json& body, const char* key) {
    std::vector<std::string> out;
    if (!body.contains(key)) return out;
    const Json& v = body.at(key);
    if (!v.is_array()) throw error(400, std::string(key) + " must be a list of labels");
    for (const auto& x : v) {
        if (!x.is_string()) throw error(400, std::string(key) + " must be a list of labels");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::string string_field(const Json& body, const char* key) {
    if (!body.contains(key) || !body.at(key).is_string()) throw error(400, std::string("missing string field ") + key);
    return body.at(key).get<std::string>();
}

std::vector<frontend::SourceFile> files_of(const Json& body) {
    if (!body.contains("files") || !body.at("files").is_array() || body.at("files").empty()) {
        throw error(400, "files must be a non-empty list of {name, text}");
    }
    std::vector<frontend::SourceFile> files;
    for (const auto& f : body.at("files")) {
        if (!f.is_object() || !f.contains("name") || !f.contains("text") || !f.at("name").is_string() || !f.at("text").is_string()) {
            throw error(400, "files must be a non-empty list of {name, text}");
        }
        files.push_back({f.at("name").get<std::string>(), f.at("text").get<std::string>()});
    }
    return files;
}

std::shared_ptr<const Model> load_model(const std::vector<frontend::SourceFile>& files) {
    auto r = frontend::load(files);
    if (!r.ok()) throw HttpError{422, {{"error", "model diagnostics"}, {"diagnostics", diagnostics_json(r.diagnostics)}}};
    return std::make_shared<const Model>(std::move(r.model));
}

void require_subject(const Model& m, const std::string& subject) {
    if (!m.find(subject)) throw HttpError{422, {{"error", "unknown subject " + subject}, {"diagnostics", Json::array()}}};
}

HttpError not_offered(const std::string& label, const std::vector<std::string>& offers) {
    return {409, {{"error", "label not offered"}, {"label", label}, {"offers", offers}}};
}

std::string fresh_id() {
    static std::mutex m;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(m);
    std::ostringstream s;
    s << std::hex;
    for (int i = 0; i < 2; ++i) {
        auto v = rng();
        for (int b = 0; b < 16; ++b) s << ((v >> (4 * b)) & 0xf);
    }
    return s.str();
}

}  // namespace

Json diagnostics_json(const std::vector<Diagnostic>& diagnostics) {
    Json ds = Json::array();
    for (const auto& d : diagnostics) {
        Json locs = Json::array();
        for (const auto& l : d.locs) locs.push_back(loc_json(l));
        ds.push_back({{"kind", kind_name(d.kind)}, {"message", d.detail}, {"locs", locs}, {"text", format_source_diagnostic(d)}});
    }
    return ds;
}

Json diagram_json(const simulate::SimulationState& s) {
    Json lifelines = Json::array();
    for (const auto& l : s.lifelines) lifelines.push_back({{"id", l}, {"label", l}});
    Json events = Json::array();
    for (const auto& e : s.diagram) {
        events.push_back({{"seq", e.seq}, {"step", e.step}, {"from", e.from}, {"to", e.to}, {"label", e.label}, {"loc", loc_json(e.loc)},
                          {"kind", e.kind}});
    }
    Json next = Json::array();
    for (const auto& l : s.next_valid) next.push_back({{"label", l}, {"legal", true}});
    for (const auto& l : s.next_illegal) next.push_back({{"label", l}, {"legal", false}});
    Json verdict = s.violated ? Json{{"status", "violated"}, {"kind", s.violation}} : Json{{"status", "ok"}};
    Json j{{"subject", s.subject}, {"lifelines", lifelines}, {"events", events}, {"next", next}, {"trace", s.trace}, {"verdict", verdict}};
    if (!s.rejected.empty()) j["rejected"] = s.rejected;
    j["configs"] = s.configs;
    return j;
}

struct Session {
    std::string id;
    std::vector<frontend::SourceFile> files;
    std::string subject;
    std::mutex mutex;  // serializes operations on this session
    simulate::SimulationState state;
    Clock::time_point created;
    Clock::time_point last_used;
};

struct Daemon::Impl {
    Options options;
    httplib::Server server;
    std::thread thread;

    mutable std::mutex table_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;

    explicit Impl(Options o) : options(std::move(o)) { routes(); }

    std::shared_ptr<Session> find(const std::string& id) {
        std::lock_guard lock(table_mutex);
        auto it = sessions.find(id);
        if (it == sessions.end()) throw error(404, "unknown session " + id);
        return it->second;
    }

    std::size_t expire() {
        auto now = options.clock();
        std::lock_guard lock(table_mutex);
        std::size_t n = 0;
        for (auto it = sessions.begin(); it != sessions.end();) {
            std::unique_lock s(it->second->mutex, std::try_to_lock);
            if (s.owns_lock() && now - it->second->last_used > options.idle_timeout) {
                s.unlock();
                it = sessions.erase(it);
                ++n;
            } else {
                ++it;
            }
        }
        return n;
    }

    static Json session_json(const Session& s) { return {{"id", s.id}, {"diagram", diagram_json(s.state)}}; }

    // Replays a full trace; a label the model does not offer is a conflict.
    static simulate::SimulationState replay_checked(std::shared_ptr<const Model> model, const std::string& subject,
                                                    const std::vector<std::string>& trace) {
        simulate::SimulationState st;
        try {
            st = simulate::replay(std::move(model), subject, trace);
        } catch (const std::invalid_argument& e) {
            throw error(400, e.what());
        }
        if (!st.rejected.empty()) {
            auto offers = st.next_valid;
            offers.insert(offers.end(), st.next_illegal.begin(), st.next_illegal.end());
            throw not_offered(st.rejected, offers);
        }
        return st;
    }

    Json create(const Json& body) {
        auto files = files_of(body);
        std::string subject = string_field(body, "subject");
        auto trace = string_list(body, "trace");
        auto model = load_model(files);
        require_subject(*model, subject);
        auto s = std::make_shared<Session>();
        s->files = std::move(files);
        s->subject = subject;
        s->state = replay_checked(model, subject, trace);
        s->created = s->last_used = options.clock();
        s->id = fresh_id();
        std::lock_guard lock(table_mutex);
        sessions[s->id] = s;
        return session_json(*s);
    }

    template <typename F>
    Json with_session(const std::string& id, F f) {
        auto s = find(id);
        std::lock_guard lock(s->mutex);
        f(*s);
        s->last_used = options.clock();
        return session_json(*s);
    }

    Json step(const std::string& id, const Json& body) {
        std::string label = string_field(body, "label");
        return with_session(id, [&](Session& s) {
            try {
                s.state = simulate::extend(s.state, label);
            } catch (const simulate::NotOffered& e) {
                throw not_offered(label, e.offers);
            } catch (const std::invalid_argument& e) {
                throw error(400, e.what());
            }
        });
    }

    Json reset(const std::string& id, const Json& body) {
        auto trace = string_list(body, "trace");
        return with_session(id, [&](Session& s) { s.state = replay_checked(s.state.model, s.subject, trace); });
    }

    Json verify(const Json& body) {
        auto model = load_model(files_of(body));
        verify::VerifyOptions vo;
        vo.bound = options.bound;
        if (body.contains("subject")) {
            std::string subject = string_field(body, "subject");
            require_subject(*model, subject);
            return Json::parse(verify::report_json(verify::verify(subject, *model, vo), subject));
        }
        return Json::parse(verify::report_json(verify::verify_all(*model, vo), "all"));
    }

    template <typename F>
    httplib::Server::Handler handler(F f, int ok_status = 200) {
        return [this, f, ok_status](const httplib::Request& req, httplib::Response& res) {
            expire();
            Json out;
            try {
                out = f(req);
                res.status = ok_status;
            } catch (const HttpError& e) {
                out = e.body;
                res.status = e.status;
            } catch (const lts::BoundExceeded& e) {
                out = {{"error", e.what()}};
                res.status = 422;
            } catch (const std::exception& e) {
                out = {{"error", e.what()}};
                res.status = 500;
            }
            res.set_content(out.dump(2) + "\n", "application/json; charset=utf-8");
        };
    }

    void routes() {
        server.Post("/sessions", handler([this](const httplib::Request& r) { return create(parse_body(r)); }, 201));
        server.Get(R"(/sessions/([^/]+))", handler([this](const httplib::Request& r) {
                       return with_session(r.matches[1].str(), [](Session&) {});
                   }));
        server.Post(R"(/sessions/([^/]+)/step)", handler([this](const httplib::Request& r) { return step(r.matches[1].str(), parse_body(r)); }));
        server.Post(R"(/sessions/([^/]+)/reset)", handler([this](const httplib::Request& r) { return reset(r.matches[1].str(), parse_body(r)); }));
        server.Post("/verify", handler([this](const httplib::Request& r) { return verify(parse_body(r)); }));
        if (!options.static_dir.empty()) server.set_mount_point("/static", options.static_dir.string());
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return;
            res.set_content(Json{{"error", "not found"}}.dump(2) + "\n", "application/json; charset=utf-8");
        });
    }
};

Daemon::Daemon(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Daemon::~Daemon() { stop(); }

int Daemon::start(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool Daemon::run(const std::string& host, int port) { return impl_->server.listen(host, port); }

void Daemon::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::size_t Daemon::session_count() const {
    std::lock_guard lock(impl_->table_mutex);
    return impl_->sessions.size();
}

std::size_t Daemon::expire() { return impl_->expire(); }

}  // namespace dzn::daemon

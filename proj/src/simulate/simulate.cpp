#include "dzn/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

namespace dzn::simulate {

namespace {

void check_label(const std::string& label) {
    if (label.empty()) throw std::invalid_argument("empty label");
    for (char c : label) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || std::string_view("_.,()!-> ").find(c) != std::string_view::npos;
        if (!ok) throw std::invalid_argument("unparseable label: " + label);
    }
}

std::string kind_of(semantics::ActionKind k) {
    switch (k) {
    case semantics::ActionKind::Call: return "call";
    case semantics::ActionKind::Reply: return "reply";
    case semantics::ActionKind::Out: return "out";
    case semantics::ActionKind::RangeError: return "range_error";
    default: return "illegal";
    }
}

std::string failure_kind(const std::string& failure_label) {
    return failure_label.starts_with("range_error") ? "range_error" : "illegal";
}

class Replayer {
public:
    Replayer(std::shared_ptr<const Model> model, std::string_view subject)
        : model_(std::move(model)), subject_(*model_, subject) {}

    SimulationState run(const std::vector<std::string>& trace) {
        SimulationState st;
        st.model = model_;
        st.subject = subject_.name();
        st.lifelines = subject_.lifelines();
        const std::string& env = st.lifelines.front();
        try {
            st.state = subject_.initial();
        } catch (const semantics::InitialRangeError& e) {
            st.violated = true;
            st.violation = semantics::range_error_label(e.variable);
            st.diagram.push_back({0, 0, subject_.name(), subject_.name(), st.violation, e.loc, "range_error"});
            return st;
        }

        std::size_t i = 0;
        while (i < trace.size()) {
            const std::string& label = trace[i];
            check_label(label);
            auto offer = subject_.offer_for(st.state, label);
            semantics::FireResult r;
            if (offer) r = subject_.fire(st.state, *offer);
            if (!offer || r.status == semantics::FireStatus::Refused) {
                st.rejected = label;
                break;
            }
            std::size_t step = st.steps++;
            ++i;
            if (r.status == semantics::FireStatus::Unhandled) {
                push(st, step, env, subject_.name(), label, r.loc, "illegal");
                st.trace.push_back(label);
                st.violated = true;
                st.violation = "unhandled";
                break;
            }
            for (std::size_t k = 0; k < r.chain.size(); ++k) {
                const auto& o = r.chain[k];
                push(st, step, o.from, o.to, o.label, o.loc, kind_of(o.kind));
                st.trace.push_back(o.label);
                if (k > 0 && i < trace.size() && trace[i] == o.label) ++i;
            }
            if (r.status == semantics::FireStatus::Ok) {
                st.state = r.next;
                continue;
            }
            // failed step
            st.violated = true;
            st.violation = r.failure_label;
            std::string kind = failure_kind(r.failure_label);
            if (r.offending.empty()) {
                push(st, step, subject_.name(), subject_.name(), r.failure_label, r.loc, kind);
            } else {
                std::string from = env, to = subject_.name();
                if (r.offending != label) {
                    // a call the port contract rejected
                    from = subject_.name();
                    to = r.offending.substr(0, r.offending.find('.'));
                } else if (offer->kind == semantics::Offer::Kind::Out && !subject_.is_interface()) {
                    from = r.offending.substr(0, r.offending.find('.'));
                }
                push(st, step, from, to, r.offending, r.loc, kind);
                st.trace.push_back(r.offending);
                if (r.offending != label && i < trace.size() && trace[i] == r.offending) ++i;
            }
            break;
        }

        st.configs = subject_.describe(st.state);
        if (!st.violated) {
            for (const auto& offer : subject_.offers(st.state)) {
                auto r = subject_.fire(st.state, offer);
                if (r.status == semantics::FireStatus::Ok) {
                    st.next_valid.push_back(offer.label);
                } else if (r.status != semantics::FireStatus::Refused) {
                    st.next_illegal.push_back(offer.label);
                }
            }
        }
        return st;
    }

private:
    static void push(SimulationState& st, std::size_t step, const std::string& from, const std::string& to, const std::string& label,
                     const SourceLoc& loc, std::string kind) {
        st.diagram.push_back({st.diagram.size(), step, from, to, label, loc, std::move(kind)});
    }

    std::shared_ptr<const Model> model_;
    semantics::Subject subject_;
};

}  // namespace

bool SimulationState::accepts(std::string_view label) const {
    return std::find(next_valid.begin(), next_valid.end(), label) != next_valid.end() ||
           std::find(next_illegal.begin(), next_illegal.end(), label) != next_illegal.end();
}

SimulationState replay(std::shared_ptr<const Model> model, std::string_view subject, const std::vector<std::string>& trace) {
    if (!model || !model->find(subject)) throw std::invalid_argument("unknown subject: " + std::string(subject));
    return Replayer(std::move(model), subject).run(trace);
}

SimulationState replay(const Model& model, std::string_view subject, const std::vector<std::string>& trace) {
    return replay(std::shared_ptr<const Model>(&model, [](const Model*) {}), subject, trace);
}

SimulationState extend(const SimulationState& s, const std::string& label) {
    check_label(label);
    if (!s.accepts(label)) {
        std::vector<std::string> offers = s.next_valid;
        offers.insert(offers.end(), s.next_illegal.begin(), s.next_illegal.end());
        throw NotOffered(label, std::move(offers));
    }
    std::vector<std::string> t = s.trace;
    t.push_back(label);
    return replay(s.model, s.subject, t);
}

lts::Lts simulator_lts(const Model& model, std::string_view subject, std::size_t bound) {
    semantics::Subject keys(model, subject);
    lts::Lts l;
    l.states = 0;
    auto fresh = [&] {
        if (l.states >= bound) throw lts::BoundExceeded(bound);
        return l.add_state();
    };

    SimulationState init = replay(model, subject, {});
    l.initial = fresh();
    auto a = keys.alphabet();
    l.alphabet.insert(a.begin(), a.end());
    if (init.violated) {
        l.add_edge(l.initial, init.violation, l.initial);
        return l;
    }

    std::unordered_map<std::string, std::size_t> rest{{keys.key(init.state), l.initial}};
    std::map<std::string, std::size_t> inner;
    std::set<std::tuple<std::size_t, std::string, std::size_t>> edges;
    auto edge = [&](std::size_t from, const std::string& label, std::size_t to) {
        if (edges.insert({from, label, to}).second) l.add_edge(from, label, to);
    };
    std::deque<std::pair<std::size_t, SimulationState>> queue{{l.initial, init}};
    while (!queue.empty()) {
        auto [s, st] = std::move(queue.front());
        queue.pop_front();
        std::vector<std::string> next = st.next_valid;
        next.insert(next.end(), st.next_illegal.begin(), st.next_illegal.end());
        for (const auto& label : next) {
            SimulationState t = extend(st, label);
            if (t.violation == "unhandled") continue;
            std::vector<std::string> chain;
            for (const auto& ev : t.diagram) {
                if (ev.step == st.steps && (ev.kind == "call" || ev.kind == "reply" || ev.kind == "out")) chain.push_back(ev.label);
            }
            std::size_t node = s;
            std::string key = std::to_string(s);
            std::size_t inner_edges = t.violated ? chain.size() : chain.size() - 1;
            for (std::size_t k = 0; k < inner_edges; ++k) {
                key += '\x1f' + chain[k];
                auto [it, added] = inner.try_emplace(key, 0);
                if (added) it->second = fresh();
                edge(node, chain[k], it->second);
                node = it->second;
            }
            if (t.violated) {
                edge(node, t.violation, node);
                continue;
            }
            std::string k = keys.key(t.state);
            auto it = rest.find(k);
            if (it == rest.end()) {
                it = rest.emplace(k, fresh()).first;
                queue.push_back({it->second, t});
            }
            edge(node, chain.back(), it->second);
        }
    }
    return l;
}

std::vector<std::string> read_trace(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        if (!line.empty()) out.emplace_back(line);
        pos = end + 1;
    }
    return out;
}

}  // namespace dzn::simulate

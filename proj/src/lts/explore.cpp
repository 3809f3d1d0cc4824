#include "dzn/lts.hpp"

#include <deque>
#include <map>
#include <tuple>
#include <unordered_map>

namespace dzn::lts {

namespace {

class Explorer {
public:
    Explorer(const semantics::Subject& subject, std::size_t bound) : subject_(subject), bound_(bound) {}

    Exploration run() {
        out_.subject = subject_.name();
        out_.lts.states = 0;
        std::optional<semantics::State> init;
        try {
            init = subject_.initial();
        } catch (const semantics::InitialRangeError& e) {
            // nothing can happen before the variables hold legal values
            std::size_t s = new_state(true, semantics::State{});
            out_.lts.initial = s;
            add_edge(s, semantics::range_error_label(e.variable), s, {true, false, {}, e.loc});
            finish();
            return std::move(out_);
        }
        out_.lts.initial = rest_state(*init);
        while (!queue_.empty()) {
            std::size_t s = queue_.front();
            queue_.pop_front();
            semantics::State state = out_.configs[s];
            for (const auto& offer : subject_.offers(state)) {
                semantics::Choices choices;
                do {
                    record(s, offer, subject_.fire(state, offer, &choices));
                } while (choices.advance());
            }
        }
        finish();
        return std::move(out_);
    }

private:
    std::size_t new_state(bool at_rest, semantics::State config) {
        if (out_.lts.states >= bound_) throw BoundExceeded(bound_);
        std::size_t s = out_.lts.add_state();
        out_.at_rest.push_back(at_rest);
        out_.configs.push_back(std::move(config));
        return s;
    }

    std::size_t rest_state(const semantics::State& state) {
        std::string key = subject_.key(state);
        auto it = rest_.find(key);
        if (it != rest_.end()) return it->second;
        std::size_t s = new_state(true, state);
        rest_.emplace(std::move(key), s);
        queue_.push_back(s);
        return s;
    }

    void add_edge(std::size_t from, const std::string& label, std::size_t to, EdgeInfo info) {
        auto key = std::make_tuple(from, label, to, info.offending);
        if (!edge_keys_.insert(key).second) return;
        out_.lts.add_edge(from, label, to);
        out_.info.push_back(std::move(info));
    }

    // Node reached from a rest state after the given label prefix.
    std::size_t step_into(std::size_t origin, const std::vector<semantics::Occurrence>& chain, std::size_t n, std::size_t from,
                          bool violating) {
        std::string key = std::to_string(origin);
        for (std::size_t i = 0; i <= n; ++i) {
            key += '\x1f';
            key += chain[i].label;
        }
        auto it = inner_.find(key);
        std::size_t to;
        if (it == inner_.end()) {
            to = new_state(false, semantics::State{});
            inner_.emplace(std::move(key), to);
        } else {
            to = it->second;
        }
        add_edge(from, chain[n].label, to, {false, violating, {}, chain[n].loc});
        return to;
    }

    void record(std::size_t s, const semantics::Offer& offer, const semantics::FireResult& r) {
        using semantics::FireStatus;
        switch (r.status) {
        case FireStatus::Refused: return;
        case FireStatus::Unhandled:
            for (const auto& u : out_.unhandled) {
                if (u.state == s && u.label == offer.label) return;
            }
            out_.unhandled.push_back({s, offer.label, r.loc});
            return;
        case FireStatus::Ok: {
            std::size_t node = s;
            for (std::size_t i = 0; i + 1 < r.chain.size(); ++i) node = step_into(s, r.chain, i, node, r.violating);
            std::size_t target = rest_state(r.next);
            add_edge(node, r.chain.back().label, target, {false, r.violating, {}, r.chain.back().loc});
            return;
        }
        case FireStatus::Failed: {
            std::size_t node = s;
            for (std::size_t i = 0; i < r.chain.size(); ++i) node = step_into(s, r.chain, i, node, r.violating);
            add_edge(node, r.failure_label, node, {true, r.violating, r.offending, r.loc});
            return;
        }
        }
    }

    void finish() {
        auto a = subject_.alphabet();
        out_.lts.alphabet.insert(a.begin(), a.end());
    }

    const semantics::Subject& subject_;
    std::size_t bound_;
    Exploration out_;
    std::deque<std::size_t> queue_;
    std::unordered_map<std::string, std::size_t> rest_;
    std::unordered_map<std::string, std::size_t> inner_;
    std::set<std::tuple<std::size_t, std::string, std::size_t, std::string>> edge_keys_;
};

}  // namespace

Exploration explore(const Model& model, std::string_view subject, const ExploreOptions& options) {
    semantics::Subject s(model, subject, {options.open_ports});
    return Explorer(s, options.bound).run();
}

Lts explore(const InterfaceDef& def, const Model& model, std::size_t bound) {
    ExploreOptions o;
    o.bound = bound;
    return explore(model, def.name, o).lts;
}

Lts explore_component(const ComponentDef& def, const Model& model, std::size_t bound) {
    ExploreOptions o;
    o.bound = bound;
    return explore(model, def.name, o).lts;
}

}  // namespace dzn::lts

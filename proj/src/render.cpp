#include "mscflow/render.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

namespace mscflow {

namespace {

std::string ctrl(const Letter& l) { return l.is_control() ? " [" + l.control()->str() + "]" : ""; }

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string render_ascii(const MscTuple& m) {
    std::vector<Lifeline> ls;
    for (const auto& [l, _] : m.words()) ls.push_back(l);
    if (ls.empty()) return "(no lifelines)\n";
    std::size_t width = 12;
    for (const auto& l : ls) width = std::max(width, l.name().size() + 4);
    std::map<Lifeline, std::size_t> col;
    for (std::size_t i = 0; i < ls.size(); ++i) col[ls[i]] = i;
    auto centre = [&](std::size_t i) { return i * width + width / 2; };
    const std::size_t total = ls.size() * width;

    std::map<EventRef, EventRef> recv_of, send_of;
    for (const auto& [s, r] : fifo_relation(m)) {
        recv_of[s] = r;
        send_of[r] = s;
    }

    std::ostringstream out;
    std::string header(total, ' ');
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const auto& n = ls[i].name();
        header.replace(centre(i) - n.size() / 2, n.size(), n);
    }
    auto rstrip = [](std::string s) {
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
    };
    out << rstrip(header) << '\n';
    auto blank = [&] {
        std::string row(total, ' ');
        for (std::size_t i = 0; i < ls.size(); ++i) row[centre(i)] = '|';
        return row;
    };

    std::map<Lifeline, std::size_t> next; // 1-based index of the next event
    for (const auto& l : ls) next[l] = 1;
    std::set<EventRef> done;
    auto remaining = [&] {
        for (const auto& l : ls)
            if (next[l] <= m.word(l).size()) return true;
        return false;
    };
    auto ready = [&](const EventRef& e) {
        auto it = send_of.find(e);
        return it == send_of.end() || done.count(it->second) != 0;
    };

    if (!remaining())
        for (int i = 0; i < 2; ++i) out << rstrip(blank()) << '\n';

    while (remaining()) {
        std::optional<EventRef> pick;
        for (const auto& l : ls) {
            EventRef e{l, next[l]};
            if (e.index <= m.word(l).size() && ready(e)) {
                pick = e;
                break;
            }
        }
        if (!pick) {
            // Not an MSC: emit the first pending event to make progress.
            for (const auto& l : ls)
                if (next[l] <= m.word(l).size()) {
                    pick = EventRef{l, next[l]};
                    break;
                }
        }
        const auto& e = *pick;
        const Letter& x = m.word(e.lifeline)[e.index - 1];
        std::string row = blank();
        std::string label;
        std::size_t c = centre(col[e.lifeline]);
        auto r = recv_of.find(e);
        if (x.is_send() && r != recv_of.end() && next[r->second.lifeline] == r->second.index) {
            const Letter& y = m.word(r->second.lifeline)[r->second.index - 1];
            std::size_t d = centre(col[r->second.lifeline]);
            std::size_t lo = std::min(c, d), hi = std::max(c, d);
            for (std::size_t k = lo + 1; k < hi; ++k) row[k] = '-';
            row[c] = '+';
            row[d < c ? lo + 1 : hi - 1] = d < c ? '<' : '>';
            label = "(" + payload_to_source(x.payload()) + ")";
            if (!(x.payload() == y.payload())) label += " -> (" + payload_to_source(y.payload()) + ")";
            label += ctrl(x);
            done.insert(r->second);
            ++next[r->second.lifeline];
        } else {
            row[c] = x.is_send() ? '>' : x.is_recv() ? '<' : x.kind() == Letter::Kind::action ? '#' : '?';
            label = x.key();
        }
        done.insert(e);
        ++next[e.lifeline];
        out << rstrip(row) << "   " << label << '\n';
    }
    return out.str();
}

std::string render_dot(const MscTuple& m) {
    std::ostringstream out;
    out << "digraph msc {\n  rankdir=TB;\n  node [shape=box, fontsize=10];\n";
    auto id = [](const EventRef& e) { return "\"" + dot_escape(e.lifeline.name()) + "_" + std::to_string(e.index) + "\""; };
    std::size_t cluster = 0;
    for (const auto& [l, w] : m.words()) {
        out << "  subgraph cluster_" << cluster++ << " {\n    label=\"" << dot_escape(l.name())
            << "\";\n";
        for (std::size_t i = 0; i < w.size(); ++i)
            out << "    " << id({l, i + 1}) << " [label=\"" << dot_escape(w[i].key()) << "\"];\n";
        for (std::size_t i = 1; i < w.size(); ++i)
            out << "    " << id({l, i}) << " -> " << id({l, i + 1}) << " [style=dotted];\n";
        out << "  }\n";
    }
    for (const auto& [s, r] : fifo_relation(m)) out << "  " << id(s) << " -> " << id(r) << ";\n";
    out << "}\n";
    return out.str();
}

} // namespace mscflow

#include "peereval/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "peereval/serialize.hpp"

namespace peereval {

namespace {

constexpr const char* kVersionLine = "# peereval-dataset v1";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
    const std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || errno == ERANGE)
        throw data_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s + "'");
    return v;
}

long parse_int(const std::string& s, std::size_t line_no, const char* what) {
    const std::string t = trim(s);
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0')
        throw data_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s + "'");
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ForecastDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("input not found: " + path);

    std::string line;
    std::size_t line_no = 0;

    // Skip comment lines; reject a mismatched format version.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::string stripped = trim(line);
            if (stripped.rfind("# peereval-dataset", 0) == 0 && stripped != kVersionLine)
                throw data_error("unsupported dataset format version: " + stripped);
            continue;
        }
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw data_error("empty dataset file: " + path);

    bool binary_form = false;
    int num_prob_cols = 0;
    if (header.size() >= 4 && header[0] == "event_id" && header[1] == "agent_id" &&
        header[2] == "outcome_space") {
        if (header[3] == "p") {
            binary_form = true;
        } else {
            for (std::size_t c = 3; c < header.size() && header[c].rfind("prob_", 0) == 0; ++c)
                ++num_prob_cols;
            if (num_prob_cols < 2)
                throw data_error("header must contain a 'p' column or prob_0..prob_{C-1} columns");
        }
    } else {
        throw data_error("unrecognized dataset header in " + path);
    }
    const std::size_t meta_col = binary_form ? 4 : 3 + static_cast<std::size_t>(num_prob_cols);
    const std::size_t outcome_col = meta_col + 1;
    if (header.size() != outcome_col + 1 || header[meta_col] != "meta" || header[outcome_col] != "outcome")
        throw data_error("dataset header must end with meta,outcome columns");

    DatasetBuilder builder;
    std::unordered_map<std::string, int> event_idx;
    std::unordered_map<std::string, int> agent_idx;
    std::vector<int> event_space;
    std::vector<std::optional<int>> event_outcome;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw data_error("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));

        const std::string event_id = trim(fields[0]);
        const std::string agent_id = trim(fields[1]);
        if (event_id.empty() || agent_id.empty())
            throw data_error("line " + std::to_string(line_no) + ": empty event or agent id");
        const long space = parse_int(fields[2], line_no, "outcome_space");
        if (space < 2 || space > 64)
            throw data_error("line " + std::to_string(line_no) + ": outcome_space must be in [2, 64]");
        if (binary_form && space != 2)
            throw data_error("line " + std::to_string(line_no) +
                             ": binary-form file cannot hold a multi-choice row");
        if (!binary_form && space > num_prob_cols)
            throw data_error("line " + std::to_string(line_no) + ": outcome_space exceeds prob columns");

        std::vector<double> probs;
        if (binary_form) {
            const double p = parse_double(fields[3], line_no, "probability");
            if (!(p >= 0.0 && p <= 1.0))
                throw data_error("line " + std::to_string(line_no) + ": probability out of range");
            probs = {p};
        } else {
            for (long c = 0; c < space; ++c) {
                const double p = parse_double(fields[3 + static_cast<std::size_t>(c)], line_no, "probability");
                if (!(p >= 0.0 && p <= 1.0))
                    throw data_error("line " + std::to_string(line_no) + ": probability out of range");
                probs.push_back(p);
            }
            for (std::size_t c = static_cast<std::size_t>(space); c < static_cast<std::size_t>(num_prob_cols); ++c)
                if (!trim(fields[3 + c]).empty())
                    throw data_error("line " + std::to_string(line_no) +
                                     ": prob column beyond outcome_space must be blank");
            if (space == 2) probs = {probs[1]}; // canonical binary scalar P(y=1)
            else {
                double sum = 0.0;
                for (double p : probs) sum += p;
                if (std::abs(sum - 1.0) > 1e-9)
                    throw data_error("line " + std::to_string(line_no) +
                                     ": multi-choice probabilities sum to " + format_double(sum));
            }
        }

        std::optional<double> meta;
        if (!trim(fields[meta_col]).empty()) {
            const double m = parse_double(fields[meta_col], line_no, "meta");
            if (!(m >= 0.0 && m <= 1.0))
                throw data_error("line " + std::to_string(line_no) + ": meta out of range");
            meta = m;
        }
        std::optional<int> outcome;
        if (!trim(fields[outcome_col]).empty()) {
            const long y = parse_int(fields[outcome_col], line_no, "outcome");
            if (y < 0 || y >= space)
                throw data_error("line " + std::to_string(line_no) + ": outcome out of range");
            outcome = static_cast<int>(y);
        }

        auto it = event_idx.find(event_id);
        int ev;
        if (it == event_idx.end()) {
            ev = builder.add_event(event_id, OutcomeSpace{static_cast<int>(space)}, outcome);
            event_idx.emplace(event_id, ev);
            event_space.push_back(static_cast<int>(space));
            event_outcome.push_back(outcome);
        } else {
            ev = it->second;
            if (event_space[static_cast<std::size_t>(ev)] != static_cast<int>(space))
                throw data_error("line " + std::to_string(line_no) +
                                 ": outcome_space disagrees with earlier rows of event '" + event_id + "'");
            if (event_outcome[static_cast<std::size_t>(ev)] != outcome)
                throw data_error("line " + std::to_string(line_no) +
                                 ": outcome disagrees with earlier rows of event '" + event_id + "'");
        }
        auto ag = agent_idx.find(agent_id);
        int aj;
        if (ag == agent_idx.end()) {
            aj = builder.add_agent(agent_id);
            agent_idx.emplace(agent_id, aj);
        } else {
            aj = ag->second;
        }
        try {
            builder.add_record(ev, aj, std::move(probs), meta);
        } catch (const Error& e) {
            throw data_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return builder.build();
}

void save_csv(const ForecastDataset& ds, const std::string& path, const std::string& comment) {
    std::ostringstream out;
    out << kVersionLine << "\n";
    if (!comment.empty()) out << "# " << comment << "\n";

    const bool binary_form = ds.all_binary();
    int max_choices = 2;
    for (const auto& ev : ds.events()) max_choices = std::max(max_choices, ev.space.num_choices);

    out << "event_id,agent_id,outcome_space,";
    if (binary_form) {
        out << "p";
    } else {
        for (int c = 0; c < max_choices; ++c) out << "prob_" << c << (c + 1 < max_choices ? "," : "");
    }
    out << ",meta,outcome\n";

    for (std::size_t r = 0; r < ds.num_records(); ++r) {
        const auto& rec = ds.record(r);
        const auto& ev = ds.event(rec.event);
        out << ev.id << ',' << ds.agent_id(rec.agent) << ',' << ev.space.num_choices << ',';
        if (binary_form) {
            out << format_double(rec.probs[0]);
        } else {
            const auto full = ds.full_probs(r);
            for (int c = 0; c < max_choices; ++c) {
                if (c < static_cast<int>(full.size())) out << format_double(full[static_cast<std::size_t>(c)]);
                if (c + 1 < max_choices) out << ',';
            }
        }
        out << ',';
        if (rec.meta) out << format_double(*rec.meta);
        out << ',';
        if (ev.outcome) out << *ev.outcome;
        out << '\n';
    }
    write_atomic(path, out.str());
}

} // namespace peereval

#include "subrep/network_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subrep {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

double parse_number(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + text + "' in " + where);
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return in;
}

} // namespace

LoadedNetwork load_network_files(const std::string& edges_path, const std::string& skills_path,
                                 const std::string& w_path) {
    LoadedNetwork out;

    // skills CSV defines the node set and its order
    std::ifstream sk = open_or_throw(skills_path);
    std::string line;
    if (!std::getline(sk, line)) throw std::invalid_argument(skills_path + ": empty file");
    const auto header = split(strip_cr(line), ',');
    if (header.size() < 2 || header[0] != "id")
        throw std::invalid_argument(skills_path + ": header must be id,<skill>,...");
    out.skill_names.assign(header.begin() + 1, header.end());
    const int l = static_cast<int>(out.skill_names.size());

    std::vector<std::string> ids;
    std::vector<std::vector<double>> skill_rows;
    while (std::getline(sk, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != l + 1)
            throw std::invalid_argument(skills_path + ": row for '" +
                                        (cells.empty() ? "" : cells[0]) + "' has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(l + 1));
        ids.push_back(cells[0]);
        std::vector<double> row(l);
        for (int k = 0; k < l; ++k) row[k] = parse_number(cells[k + 1], skills_path);
        skill_rows.push_back(std::move(row));
    }
    if (ids.empty()) throw std::invalid_argument(skills_path + ": no nodes");

    Eigen::MatrixXd L(ids.size(), l);
    for (std::size_t i = 0; i < skill_rows.size(); ++i)
        for (int k = 0; k < l; ++k) L(static_cast<int>(i), k) = skill_rows[i][k];

    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
        if (!index.emplace(ids[i], i).second)
            throw std::invalid_argument(skills_path + ": duplicate id " + ids[i]);
    }

    std::ifstream ed = open_or_throw(edges_path);
    std::vector<std::tuple<int, int, double>> edges;
    int line_no = 0;
    while (std::getline(ed, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line, '\t');
        if (cells.size() != 3)
            throw std::invalid_argument(edges_path + ":" + std::to_string(line_no) +
                                        ": expected src<TAB>dst<TAB>weight");
        const auto src = index.find(cells[0]);
        const auto dst = index.find(cells[1]);
        if (src == index.end() || dst == index.end())
            throw std::invalid_argument(edges_path + ":" + std::to_string(line_no) +
                                        ": id not present in the skills file");
        edges.emplace_back(src->second, dst->second,
                           parse_number(cells[2], edges_path + ":" + std::to_string(line_no)));
    }
    out.net = SocialNetwork::from_edges(std::move(ids), edges, std::move(L));

    std::ifstream wf = open_or_throw(w_path);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(l, l);
    int row = 0;
    while (std::getline(wf, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        if (row >= l) throw std::invalid_argument(w_path + ": more than " + std::to_string(l) + " rows");
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != l)
            throw std::invalid_argument(w_path + ": row " + std::to_string(row) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(l));
        for (int j = 0; j < l; ++j) W(row, j) = parse_number(cells[j], w_path);
        ++row;
    }
    if (row != l)
        throw std::invalid_argument(w_path + ": " + std::to_string(row) + " rows, expected " +
                                    std::to_string(l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < i; ++j)
            if (W(i, j) != 0.0) {
                out.warnings.push_back("W(" + std::to_string(i) + "," + std::to_string(j) +
                                       ") is below the diagonal; zeroed");
                W(i, j) = 0.0;
            }
    out.W.W = std::move(W);
    return out;
}

NetworkFilePaths write_network_files(const SocialNetwork& net, const SkillRelevance& W,
                                     const std::string& prefix,
                                     const std::vector<std::string>& skill_names) {
    NetworkFilePaths paths{prefix + ".edges.tsv", prefix + ".skills.csv", prefix + ".w.csv"};

    std::ofstream ed(paths.edges);
    if (!ed) throw std::invalid_argument("cannot write " + paths.edges);
    for (int u = 0; u < net.node_count(); ++u)
        for (const auto& [v, w] : net.neighbors(u))
            if (u < v) ed << net.node_id(u) << '\t' << net.node_id(v) << '\t' << format_double(w) << '\n';

    std::ofstream sk(paths.skills);
    if (!sk) throw std::invalid_argument("cannot write " + paths.skills);
    sk << "id";
    for (int k = 0; k < net.skill_count(); ++k) {
        if (k < static_cast<int>(skill_names.size()))
            sk << ',' << skill_names[k];
        else
            sk << ",skill_" << k + 1;
    }
    sk << '\n';
    for (int i = 0; i < net.node_count(); ++i) {
        sk << net.node_id(i);
        for (int k = 0; k < net.skill_count(); ++k) sk << ',' << format_double(net.skills()(i, k));
        sk << '\n';
    }

    std::ofstream wf(paths.relevance);
    if (!wf) throw std::invalid_argument("cannot write " + paths.relevance);
    for (int i = 0; i < W.size(); ++i) {
        for (int j = 0; j < W.size(); ++j) {
            if (j) wf << ',';
            wf << format_double(W.W(i, j));
        }
        wf << '\n';
    }
    return paths;
}

std::vector<CollabRecord> read_records_jsonl(std::istream& in, int* malformed_lines) {
    std::vector<CollabRecord> records;
    int bad = 0;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);

        auto malformed = [&] { ++bad; };
        if (j.is_discarded() || !j.is_object()) {
            malformed();
            continue;
        }
        bool ok = j.contains("members") && j["members"].is_array() &&
                  j.contains("tags") && j["tags"].is_array() &&
                  j.contains("year") && j["year"].is_number_integer();
        for (auto it = j.begin(); ok && it != j.end(); ++it)
            if (it.key() != "members" && it.key() != "tags" && it.key() != "year" &&
                it.key() != "weight")
                ok = false;
        if (ok && j.contains("weight") && !j["weight"].is_number()) ok = false;
        if (ok)
            for (const auto& m : j["members"])
                if (!m.is_string()) ok = false;
        if (ok)
            for (const auto& t : j["tags"])
                if (!t.is_string()) ok = false;
        if (!ok) {
            malformed();
            continue;
        }

        CollabRecord rec;
        for (const auto& m : j["members"]) rec.members.push_back(m.get<std::string>());
        for (const auto& t : j["tags"]) rec.tags.push_back(t.get<std::string>());
        rec.year = j["year"].get<int>();
        rec.weight = j.contains("weight") ? j["weight"].get<double>() : 1.0;
        records.push_back(std::move(rec));
    }
    if (malformed_lines) *malformed_lines = bad;
    return records;
}

std::vector<CollabRecord> read_records_file(const std::string& path, int* malformed_lines) {
    std::ifstream in = open_or_throw(path);
    return read_records_jsonl(in, malformed_lines);
}

} // namespace subrep

#include "ultradiff/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

namespace ultradiff {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

}  // namespace

std::vector<UltrametricViolation> validate_ultrametric(const FiniteUltrametricSpace& space) {
    std::vector<UltrametricViolation> out;
    const std::size_t n = space.size();
    if (space.dist.size() != n) {
        out.push_back({"shape", 0, 0, 0, "distance matrix row count differs from label count"});
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (space.dist[i].size() != n) {
            out.push_back({"shape", i, 0, 0,
                           "row " + std::to_string(i) + " is not of length " + std::to_string(n)});
            return out;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (space.dist[i][i] != 0) {
            out.push_back({"diagonal", i, i, 0,
                           "delta(" + space.labels[i] + ", " + space.labels[i] + ") != 0"});
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (space.dist[i][j] != space.dist[j][i]) {
                out.push_back({"symmetry", i, j, 0,
                               "delta(" + space.labels[i] + ", " + space.labels[j] +
                                   ") differs from its transpose"});
            }
            if (space.dist[i][j] <= 0) {
                out.push_back({"positivity", i, j, 0,
                               "delta(" + space.labels[i] + ", " + space.labels[j] +
                                   ") must be positive"});
            }
        }
    }
    if (!out.empty()) return out;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const Rational& ab = space.dist[i][j];
                const Rational& ac = space.dist[i][k];
                const Rational& bc = space.dist[j][k];
                const bool ok = ab <= std::max(ac, bc) && ac <= std::max(ab, bc) &&
                                bc <= std::max(ab, ac);
                if (!ok) {
                    out.push_back({"triangle", i, j, k,
                                   "strong triangle inequality fails on (" + space.labels[i] +
                                       ", " + space.labels[j] + ", " + space.labels[k] + ")"});
                }
            }
        }
    }
    return out;
}

const BallAddress& EmbeddingResult::leaf_of(const std::string& label) const {
    for (const auto& [name, leaf] : assignment) {
        if (name == label) return leaf;
    }
    throw std::out_of_range("no such point label: " + label);
}

EmbeddingResult embed(const FiniteUltrametricSpace& space, Base base) {
    {
        auto violations = validate_ultrametric(space);
        if (!violations.empty()) {
            throw std::invalid_argument("not an ultrametric space: " + violations.front().message);
        }
    }
    const std::size_t n = space.size();

    std::set<Rational> distinct;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) distinct.insert(space.dist[i][j]);
    }
    std::map<Rational, int> level_map;
    int rank = 0;
    for (const Rational& d : distinct) level_map[d] = ++rank;
    const int levels = rank;

    // Clusters per rank, bottom-up; each cluster is the sorted point set of a
    // dendrogram node. The ultrametric property makes "delta <= delta_r" an
    // equivalence, so clusters are plain components.
    std::vector<std::vector<std::vector<std::size_t>>> tiers;
    std::vector<std::vector<std::size_t>> singletons;
    for (std::size_t i = 0; i < n; ++i) singletons.push_back({i});
    tiers.push_back(singletons);
    for (const Rational& d : distinct) {
        std::vector<std::size_t> comp(n);
        std::iota(comp.begin(), comp.end(), 0);
        const auto find = [&comp](std::size_t x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (space.dist[i][j] <= d) {
                    const std::size_t ri = find(i);
                    const std::size_t rj = find(j);
                    if (ri != rj) comp[std::max(ri, rj)] = std::min(ri, rj);
                }
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
        std::vector<std::vector<std::size_t>> tier;
        for (auto& [root, members] : groups) tier.push_back(std::move(members));
        std::sort(tier.begin(), tier.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        tiers.push_back(std::move(tier));
    }

    // Digit of each point at every rank transition: the index of its
    // rank-(r-1) cluster among the children of its rank-r cluster, children
    // ordered by smallest member.
    const Window window(0, levels);
    std::vector<std::vector<std::uint8_t>> paths(n, std::vector<std::uint8_t>(
                                                        static_cast<std::size_t>(levels)));
    for (int r = 1; r <= levels; ++r) {
        const auto& fine = tiers[static_cast<std::size_t>(r - 1)];
        for (const auto& cluster : tiers[static_cast<std::size_t>(r)]) {
            std::vector<const std::vector<std::size_t>*> kids;
            for (const auto& sub : fine) {
                if (std::binary_search(cluster.begin(), cluster.end(), sub.front())) {
                    kids.push_back(&sub);
                }
            }
            if (kids.size() > base.value) {
                throw BranchOverflow("dendrogram node {" +
                                         std::to_string(cluster.front()) + ", ...} has " +
                                         std::to_string(kids.size()) +
                                         " children; base " + std::to_string(base.value) +
                                         " is too small",
                                     kids.size());
            }
            for (std::size_t d = 0; d < kids.size(); ++d) {
                for (std::size_t point : *kids[d]) {
                    paths[point][static_cast<std::size_t>(levels - r)] =
                        static_cast<std::uint8_t>(d);
                }
            }
        }
    }

    EmbeddingResult result{base, window, {}, std::move(level_map)};
    for (std::size_t i = 0; i < n; ++i) {
        result.assignment.emplace_back(space.labels[i],
                                       BallAddress(base, window, 0, std::move(paths[i])));
    }
    return result;
}

MeasureTree to_measure_tree(const EmbeddingResult& result, Window window,
                            const Rational& leaf_density) {
    if (window.gamma_max < result.window.gamma_max || window.gamma_min > 0) {
        throw std::invalid_argument("window too shallow for the deepest distance level");
    }
    std::vector<Rational> densities(
        static_cast<std::size_t>(leaf_count(result.base, window)), Rational(0));
    for (const auto& [label, leaf] : result.assignment) {
        const BallAddress target = ball_of(leaf.center(), window.gamma_min, window);
        densities[static_cast<std::size_t>(leaf_index(target))] = leaf_density;
    }
    return MeasureTree(result.base, window, std::move(densities));
}

FiniteUltrametricSpace parse_distance_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    FiniteUltrametricSpace space;
    bool have_header = false;
    while (std::getline(ss, line)) {
        if (trim(line).empty() || trim(line).front() == '#') continue;
        auto cells = split_csv_line(line);
        if (!have_header) {
            space.labels = cells;
            have_header = true;
            continue;
        }
        std::vector<Rational> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_rational(cell));
        space.dist.push_back(std::move(row));
    }
    if (!have_header) throw std::invalid_argument("empty distance matrix file");
    return space;
}

namespace {

struct DendrogramParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit DendrogramParser(const std::string& t) : text(t) {}

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_space();
        return pos < text.size() ? text[pos] : '\0';
    }

    /// Returns the member point indices of the node; records distances into
    /// the matrix as it unwinds.
    std::vector<std::size_t> parse_node(FiniteUltrametricSpace& space) {
        skip_space();
        if (peek() == '(') {
            ++pos;  // '('
            std::vector<std::vector<std::size_t>> groups;
            groups.push_back(parse_node(space));
            while (peek() == ',') {
                ++pos;
                groups.push_back(parse_node(space));
            }
            if (peek() != ')') throw std::invalid_argument("dendrogram: expected ')'");
            ++pos;
            if (peek() != ':') throw std::invalid_argument("dendrogram: expected ':height'");
            ++pos;
            const Rational height = parse_height();
            std::vector<std::size_t> members;
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                for (std::size_t gj = gi + 1; gj < groups.size(); ++gj) {
                    for (std::size_t a : groups[gi]) {
                        for (std::size_t b : groups[gj]) {
                            space.dist[a][b] = height;
                            space.dist[b][a] = height;
                        }
                    }
                }
                members.insert(members.end(), groups[gi].begin(), groups[gi].end());
            }
            return members;
        }
        return {parse_label(space)};
    }

    std::size_t parse_label(FiniteUltrametricSpace& space) {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ')' && text[pos] != ':' &&
               text[pos] != '(' && !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        if (pos == start) throw std::invalid_argument("dendrogram: expected a point label");
        space.labels.push_back(text.substr(start, pos - start));
        for (auto& row : space.dist) row.emplace_back(0);
        space.dist.emplace_back(space.labels.size(), Rational(0));
        return space.labels.size() - 1;
    }

    Rational parse_height() {
        skip_space();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ')' &&
               !std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
        return parse_rational(text.substr(start, pos - start));
    }
};

}  // namespace

FiniteUltrametricSpace parse_dendrogram(const std::string& text) {
    FiniteUltrametricSpace space;
    DendrogramParser parser(text);
    parser.parse_node(space);
    parser.skip_space();
    if (parser.pos != text.size()) {
        throw std::invalid_argument("dendrogram: trailing characters after the root node");
    }
    return space;
}

nlohmann::json embedding_report_json(const EmbeddingResult& result) {
    nlohmann::json level_map = nlohmann::json::object();
    for (const auto& [delta, level] : result.level_map) {
        level_map[rational_to_string(delta)] = level;
    }
    nlohmann::json assignment = nlohmann::json::object();
    for (const auto& [label, leaf] : result.assignment) {
        assignment[label] = leaf.path_string();
    }
    return nlohmann::json{{"p", result.base.value},
                          {"window",
                           {{"gamma_min", result.window.gamma_min},
                            {"gamma_max", result.window.gamma_max}}},
                          {"level_map", level_map},
                          {"assignment", assignment}};
}

}  // namespace ultradiff

#ifndef ULTRADIFF_EMBEDDING_HPP
#define ULTRADIFF_EMBEDDING_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ultradiff/measure_tree.hpp"
#include "ultradiff/padic.hpp"
#include "ultradiff/rational.hpp"

namespace ultradiff {

/// A finite metric space given by labels and a symmetric rational distance
/// matrix; the candidate for isometric embedding.
struct FiniteUltrametricSpace {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> dist;

    std::size_t size() const { return labels.size(); }
};

struct UltrametricViolation {
    std::string kind;  // "shape" | "diagonal" | "symmetry" | "positivity" | "triangle"
    std::size_t i = 0, j = 0, k = 0;
    std::string message;
};

/// Empty result iff the matrix is a genuine ultrametric (strong triangle
/// inequality included). Violations are reported, never thrown.
std::vector<UltrametricViolation> validate_ultrametric(const FiniteUltrametricSpace& space);

class BranchOverflow : public std::runtime_error {
  public:
    BranchOverflow(const std::string& what, std::size_t child_count)
        : std::runtime_error(what), child_count(child_count) {}
    std::size_t child_count;
};

struct EmbeddingResult {
    Base base;
    Window window;                      // [0, L], L = number of distance levels
    std::vector<std::pair<std::string, BallAddress>> assignment;  // input order
    std::map<Rational, int> level_map;  // delta_i -> exponent i

    const BallAddress& leaf_of(const std::string& label) const;
};

/// Isometric embedding into the base-p window: distinct distances get
/// consecutive exponents 1..L (smallest first); at each dendrogram node the
/// children, ordered by smallest member index, receive digits 0,1,2,...
/// Throws BranchOverflow when a node has more than p children.
EmbeddingResult embed(const FiniteUltrametricSpace& space, Base base);

/// Indicator-of-image measure: the given density on every assigned leaf of
/// the target window, zero elsewhere. The window must contain the image
/// (gamma_min <= 0 and gamma_max >= the embedding's top level).
MeasureTree to_measure_tree(const EmbeddingResult& result, Window window,
                            const Rational& leaf_density);

/// CSV distance matrix: header row of labels, then a square numeric body.
FiniteUltrametricSpace parse_distance_csv(const std::string& text);

/// Nested parenthesized dendrogram with merge heights, e.g.
/// ((u1,u2):1,u3):2 -- the distance of two points is the height of their
/// smallest common node.
FiniteUltrametricSpace parse_dendrogram(const std::string& text);

nlohmann::json embedding_report_json(const EmbeddingResult& result);

}  // namespace ultradiff

#endif

#include "sigmove/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "sigmove/error.hpp"
#include "sigmove/market_data.hpp"

namespace sigmove {

namespace {

__extension__ using Wide = unsigned __int128;

// Split quality as the exact fraction num/den of sum over children and
// classes of count^2 / child_size. Maximizing it minimizes weighted Gini, and
// integer comparison keeps ties exact.
struct Purity {
  Wide num = 0;
  Wide den = 1;
  bool operator>(const Purity& o) const noexcept { return num * o.den > o.num * den; }
};

Wide sq(std::size_t v) noexcept { return static_cast<Wide>(v) * v; }

Purity node_purity(std::size_t pos, std::size_t n) noexcept { return {sq(pos) + sq(n - pos), n}; }

Purity split_purity(std::size_t left_pos, std::size_t nl, std::size_t pos, std::size_t n) noexcept {
  const std::size_t nr = n - nl, right_pos = pos - left_pos;
  const Wide l = sq(left_pos) + sq(nl - left_pos);
  const Wide r = sq(right_pos) + sq(nr - right_pos);
  return {l * nr + r * nl, static_cast<Wide>(nl) * nr};
}

struct SplitChoice {
  std::uint32_t feature = TreeNode::kLeaf;
  double threshold = 0.0;
  Purity score;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const std::uint8_t> y, const ForestConfig& config,
              Rng& rng)
      : x_(x), y_(y), config_(config), rng_(rng), candidates_(x.cols) {
    std::iota(candidates_.begin(), candidates_.end(), std::size_t{0});
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    DecisionTree tree;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  std::uint32_t grow(DecisionTree& tree, std::vector<std::size_t>& rows, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::size_t pos = 0;
    for (auto r : rows) pos += y_[r];
    const std::size_t m = rows.size();
    {
      TreeNode& node = tree.nodes[index];
      node.sample_count = m;
      node.positive_fraction = m ? static_cast<double>(pos) / static_cast<double>(m) : 0.0;
    }

    const bool pure = pos == 0 || pos == m;
    const bool depth_capped = config_.max_depth && depth >= *config_.max_depth;
    if (pure || m < config_.min_samples_split || depth_capped) return index;

    const auto split = best_split(rows, pos);
    if (split.feature == TreeNode::kLeaf) return index;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[index].feature = split.feature;
    tree.nodes[index].threshold = split.threshold;
    const auto l = grow(tree, left, depth + 1);
    const auto r = grow(tree, right, depth + 1);
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
    return index;
  }

  std::vector<std::size_t> draw_features() {
    const std::size_t p = x_.cols;
    const std::size_t k = config_.max_features;
    if (k >= p) return candidates_;
    std::vector<std::size_t> pool = candidates_;
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(pool[i], pool[pick(rng_)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, std::size_t pos) {
    const std::size_t m = rows.size();
    SplitChoice best;
    best.score = node_purity(pos, m);

    std::vector<std::pair<double, std::uint8_t>> column(rows.size());
    for (auto f : draw_features()) {
      for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_pos = 0;
      for (std::size_t i = 1; i < column.size(); ++i) {
        left_pos += column[i - 1].second;
        if (!(column[i - 1].first < column[i].first)) continue;
        const Purity score = split_purity(left_pos, i, pos, m);
        if (score > best.score) {
          const double lo = column[i - 1].first, hi = column[i].first;
          double mid = (lo + hi) / 2.0;
          if (!std::isfinite(mid)) mid = lo / 2.0 + hi / 2.0;
          if (mid >= hi) mid = lo;  // adjacent doubles
          best = {static_cast<std::uint32_t>(f), mid, score};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const std::uint8_t> y_;
  const ForestConfig& config_;
  Rng& rng_;
  std::vector<std::size_t> candidates_;
};

ForestConfig resolved(ForestConfig config, std::size_t p) {
  if (config.max_features == 0) config.max_features = default_max_features(p);
  if (config.max_features > p) throw UsageError("max_features exceeds feature count");
  if (config.n_trees == 0) throw UsageError("n_trees must be positive");
  if (config.min_samples_split == 0) config.min_samples_split = 2;
  return config;
}

}  // namespace

std::size_t default_max_features(std::size_t n_features) noexcept {
  const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(k, 1);
}

double gini_impurity(std::size_t n_pos, std::size_t n) noexcept {
  const double q = static_cast<double>(n_pos) / static_cast<double>(n);
  return 1.0 - q * q - (1.0 - q) * (1.0 - q);
}

double gini_impurity(std::span<const std::uint8_t> labels) {
  if (labels.empty()) throw UsageError("gini impurity of an empty label set");
  const auto pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
  return gini_impurity(pos, labels.size());
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return i;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].is_leaf()) d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
  }
  return deepest;
}

DecisionTree fit_tree(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                      std::span<const std::size_t> rows, const ForestConfig& config, Rng& rng) {
  if (rows.empty()) throw UsageError("fit_tree needs at least one sample");
  const ForestConfig cfg = resolved(config, features.cols);
  TreeBuilder builder(features, labels, cfg, rng);
  return builder.build({rows.begin(), rows.end()});
}

ForestModel fit_forest(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                       std::size_t n_rows, const ForestConfig& config) {
  if (n_rows == 0) throw DataError("random forest needs a non-empty training partition");
  if (n_rows > features.rows || n_rows > labels.size()) throw UsageError("training rows out of range");
  ForestModel model;
  model.config = resolved(config, features.cols);
  model.n_features = features.cols;
  model.n_train = n_rows;
  model.trees.reserve(model.config.n_trees);

  std::vector<std::size_t> rows(n_rows);
  for (std::size_t t = 0; t < model.config.n_trees; ++t) {
    Rng rng = make_rng(derive_seed(model.config.seed, {t}));
    if (model.config.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n_rows - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    TreeBuilder builder(features, labels, model.config, rng);
    model.trees.push_back(builder.build(rows));
  }
  return model;
}

ForestModel fit_forest(const LabeledDataset& dataset, const ForestConfig& config) {
  return fit_forest(dataset.features, dataset.labels, dataset.split_index, config);
}

std::vector<double> forest_predict_proba(const ForestModel& model, const FeatureMatrix& features) {
  if (features.cols != model.n_features)
    throw UsageError("feature width " + std::to_string(features.cols) + " does not match model width " +
                     std::to_string(model.n_features));
  std::vector<double> scores(features.rows, 0.0);
  for (std::size_t r = 0; r < features.rows; ++r) {
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.predict(features.row(r));
    scores[r] = sum / static_cast<double>(model.trees.size());
  }
  return scores;
}

namespace {

void write_node(const DecisionTree& tree, std::size_t i, std::ostream& out) {
  const TreeNode& n = tree.nodes[i];
  if (n.is_leaf()) {
    out << "L " << format_double(n.positive_fraction) << ' ' << n.sample_count << '\n';
    return;
  }
  out << "I " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.sample_count << ' '
      << format_double(n.positive_fraction) << '\n';
  write_node(tree, n.left, out);
  write_node(tree, n.right, out);
}

template <typename T>
T parse_field(const std::string& token) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw DataError("forest file: bad numeric field `" + token + "`");
  return value;
}

std::string expect_key(std::istream& in, const char* key) {
  std::string k, v;
  if (!(in >> k >> v) || k != key) throw DataError(std::string("forest file: expected `") + key + "`");
  return v;
}

std::uint32_t read_node(DecisionTree& tree, std::istream& in, std::size_t budget) {
  if (tree.nodes.size() >= budget) throw DataError("forest file: node count exceeded");
  std::string tag;
  if (!(in >> tag)) throw DataError("forest file: truncated tree");
  const auto index = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  std::string a, b, c, d;
  if (tag == "L") {
    if (!(in >> a >> b)) throw DataError("forest file: truncated leaf");
    tree.nodes[index].positive_fraction = parse_field<double>(a);
    tree.nodes[index].sample_count = parse_field<std::size_t>(b);
    return index;
  }
  if (tag != "I") throw DataError("forest file: unknown node tag `" + tag + "`");
  if (!(in >> a >> b >> c >> d)) throw DataError("forest file: truncated internal node");
  tree.nodes[index].feature = parse_field<std::uint32_t>(a);
  tree.nodes[index].threshold = parse_field<double>(b);
  tree.nodes[index].sample_count = parse_field<std::size_t>(c);
  tree.nodes[index].positive_fraction = parse_field<double>(d);
  const auto l = read_node(tree, in, budget);
  const auto r = read_node(tree, in, budget);
  tree.nodes[index].left = l;
  tree.nodes[index].right = r;
  return index;
}

}  // namespace

void save_forest(const ForestModel& model, std::ostream& out) {
  const auto& c = model.config;
  out << "sigmove-forest 1\n"
      << "n_trees " << model.trees.size() << '\n'
      << "n_features " << model.n_features << '\n'
      << "n_train " << model.n_train << '\n'
      << "max_features " << c.max_features << '\n'
      << "max_depth " << (c.max_depth ? std::to_string(*c.max_depth) : std::string("none")) << '\n'
      << "min_samples_split " << c.min_samples_split << '\n'
      << "bootstrap " << (c.bootstrap ? 1 : 0) << '\n'
      << "seed " << c.seed << '\n';
  for (const auto& tree : model.trees) {
    out << "tree " << tree.nodes.size() << '\n';
    write_node(tree, 0, out);
  }
}

ForestModel load_forest(std::istream& in) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "sigmove-forest" || version != "1")
    throw DataError("not a sigmove forest file");
  ForestModel model;
  const auto n_trees = parse_field<std::size_t>(expect_key(in, "n_trees"));
  model.n_features = parse_field<std::size_t>(expect_key(in, "n_features"));
  model.n_train = parse_field<std::size_t>(expect_key(in, "n_train"));
  model.config.n_trees = n_trees;
  model.config.max_features = parse_field<std::size_t>(expect_key(in, "max_features"));
  const auto depth = expect_key(in, "max_depth");
  if (depth != "none") model.config.max_depth = parse_field<std::size_t>(depth);
  model.config.min_samples_split = parse_field<std::size_t>(expect_key(in, "min_samples_split"));
  model.config.bootstrap = parse_field<int>(expect_key(in, "bootstrap")) != 0;
  model.config.seed = parse_field<std::uint64_t>(expect_key(in, "seed"));
  for (std::size_t t = 0; t < n_trees; ++t) {
    const auto count = parse_field<std::size_t>(expect_key(in, "tree"));
    DecisionTree tree;
    tree.nodes.reserve(count);
    read_node(tree, in, count);
    if (tree.nodes.size() != count) throw DataError("forest file: node count mismatch");
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace sigmove

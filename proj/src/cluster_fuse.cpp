#include "epicurve/cluster_fuse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "epicurve/errors.hpp"
#include "epicurve/rng.hpp"
#include "text.hpp"

namespace epicurve {

namespace {

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest(const Point& p, const std::vector<Point>& centers) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centers[0]);
  for (std::size_t c = 1; c < centers.size(); ++c) {
    const double d = squared_distance(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<Point> seed_plus_plus(const std::vector<Point>& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centers;
  centers.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > u) break;
      }
    } else {
      pick = rng.below(n);
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
  }
  return centers;
}

// Means of the assigned points; clusters without points keep their center.
void update_centers(const std::vector<Point>& points, const std::vector<std::size_t>& assignment,
                    std::vector<Point>& centers, std::vector<std::size_t>& sizes) {
  const std::size_t dim = points.front().size();
  std::vector<Point> sums(centers.size(), Point(dim, 0.0));
  sizes.assign(centers.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++sizes[assignment[i]];
    for (std::size_t d = 0; d < dim; ++d) sums[assignment[i]][d] += points[i][d];
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (sizes[c] == 0) continue;
    for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
  }
}

KMeansResult lloyd(const std::vector<Point>& points, std::vector<Point> centers, int max_iterations) {
  const std::size_t n = points.size();
  KMeansResult out;
  out.assignment.assign(n, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> sizes;
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest(points[i], centers);
      if (c != out.assignment[i]) {
        out.assignment[i] = c;
        changed = true;
      }
    }
    out.iterations = iter + 1;
    if (!changed) break;
    update_centers(points, out.assignment, centers, sizes);
    // An emptied cluster takes over the point farthest from its own center.
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[out.assignment[i]] < 2) continue;
        const double d = squared_distance(points[i], centers[out.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) continue;  // fewer distinct points than clusters
      out.assignment[far] = c;
      update_centers(points, out.assignment, centers, sizes);
    }
  }
  out.centroids = std::move(centers);
  for (std::size_t i = 0; i < n; ++i) out.wcss += squared_distance(points[i], out.centroids[out.assignment[i]]);
  return out;
}

struct CompleteRows {
  std::vector<Point> points;
  std::vector<std::size_t> rows;
};

CompleteRows complete_rows(const FeatureTable& table, const std::vector<std::string>& columns) {
  if (columns.empty()) throw ConfigError("no columns selected");
  std::vector<const NumericColumn*> cols;
  for (const auto& name : columns) cols.push_back(&table.column(name));
  CompleteRows s;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    bool complete = std::all_of(cols.begin(), cols.end(), [r](const NumericColumn* c) { return (*c)[r].has_value(); });
    if (!complete) continue;
    Point p;
    for (const auto* c : cols) p.push_back(*(*c)[r]);
    s.points.push_back(std::move(p));
    s.rows.push_back(r);
  }
  return s;
}

struct Scaling {
  std::vector<double> means;
  std::vector<double> scales;
};

// Column means and population standard deviations; constant columns keep scale 1.
Scaling column_scaling(const std::vector<Point>& points) {
  const std::size_t dim = points.front().size();
  Scaling s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
  const double n = static_cast<double>(points.size());
  for (std::size_t d = 0; d < dim; ++d) {
    double sum = 0.0;
    for (const auto& p : points) sum += p[d];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& p : points) ss += (p[d] - mean) * (p[d] - mean);
    const double sd = std::sqrt(ss / n);
    s.means[d] = mean;
    s.scales[d] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const std::vector<Point>& points, const KMeansOptions& options) {
  if (options.k < 1) throw ConfigError("k must be at least 1");
  if (options.restarts < 1) throw ConfigError("restarts must be at least 1");
  const auto k = static_cast<std::size_t>(options.k);
  if (points.size() < k) {
    throw ComputationError("k-means needs at least " + std::to_string(k) + " complete rows, got " +
                           std::to_string(points.size()));
  }
  std::vector<Point> work = points;
  Scaling scaling;
  if (options.standardize) {
    scaling = column_scaling(points);
    for (auto& p : work)
      for (std::size_t d = 0; d < p.size(); ++d) p[d] = (p[d] - scaling.means[d]) / scaling.scales[d];
  }
  KMeansResult best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(options.seed, static_cast<std::uint64_t>(r));
    KMeansResult run = lloyd(work, seed_plus_plus(work, k, rng), options.max_iterations);
    run.restart = r;
    if (!have || run.wcss < best.wcss) {
      best = std::move(run);
      have = true;
    }
  }

  // Renumber clusters by first occurrence.
  std::vector<std::size_t> relabel(k, k);
  std::size_t next = 0;
  for (std::size_t c : best.assignment)
    if (relabel[c] == k) relabel[c] = next++;
  for (std::size_t c = 0; c < k; ++c)
    if (relabel[c] == k) relabel[c] = next++;
  std::vector<Point> centroids(k);
  for (std::size_t c = 0; c < k; ++c) centroids[relabel[c]] = best.centroids[c];
  if (options.standardize) {
    for (auto& c : centroids)
      for (std::size_t d = 0; d < c.size(); ++d) c[d] = c[d] * scaling.scales[d] + scaling.means[d];
  }
  for (auto& c : best.assignment) c = relabel[c];
  best.centroids = std::move(centroids);
  return best;
}

FusedFeature kmeans_fuse(const FeatureTable& table, const std::string& name, const std::vector<std::string>& columns,
                         const KMeansOptions& options) {
  CompleteRows s = complete_rows(table, columns);
  if (s.points.size() < static_cast<std::size_t>(std::max(options.k, 1))) {
    throw ComputationError("fusion '" + name + "' needs at least " + std::to_string(options.k) +
                           " complete rows, got " + std::to_string(s.points.size()));
  }
  KMeansResult km = kmeans(s.points, options);

  FusedFeature f;
  f.name = name;
  f.source_columns = columns;
  f.k = options.k;
  f.seed = options.seed;
  f.wcss = km.wcss;
  if (options.standardize) {
    const Scaling scaling = column_scaling(s.points);
    f.means = scaling.means;
    f.scales = scaling.scales;
  } else {
    f.means.assign(columns.size(), 0.0);
    f.scales.assign(columns.size(), 1.0);
  }
  f.labels.assign(table.rows(), 0);
  for (std::size_t i = 0; i < s.rows.size(); ++i) f.labels[s.rows[i]] = static_cast<Category>(km.assignment[i] + 1);
  f.centroids = km.centroids;
  return f;
}

void write_centroids_csv(std::ostream& out, const FusedFeature& fused) {
  out << "cluster";
  for (const auto& c : fused.source_columns) out << ',' << c;
  out << '\n';
  for (std::size_t c = 0; c < fused.centroids.size(); ++c) {
    out << c + 1;
    for (double v : fused.centroids[c]) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

HCTree ward_linkage(const std::vector<Point>& points, std::vector<std::string> leaves) {
  const std::size_t n = points.size();
  if (n < 2) throw ComputationError("hierarchical clustering needs at least 2 usable rows");
  if (leaves.size() != n) throw ComputationError("leaf labels do not match the number of points");

  std::vector<std::vector<double>> d2(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d2[i][j] = d2[j][i] = squared_distance(points[i], points[j]);

  // Slot i always holds the cluster whose smallest leaf index is i.
  std::vector<bool> active(n, true);
  std::vector<double> size(n, 1.0);
  std::vector<std::size_t> node(n);
  for (std::size_t i = 0; i < n; ++i) node[i] = i;

  // nn[i]: nearest active j > i (ties to the smaller j).
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> nn(n, kNone);
  std::vector<double> nn_d(n, std::numeric_limits<double>::infinity());
  auto refresh = [&](std::size_t i) {
    nn[i] = kNone;
    nn_d[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (active[j] && d2[i][j] < nn_d[i]) {
        nn_d[i] = d2[i][j];
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  HCTree tree;
  tree.leaves = std::move(leaves);
  double previous = 0.0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] && nn[i] != kNone && (a == kNone || nn_d[i] < nn_d[a])) a = i;
    }
    const std::size_t b = nn[a];
    const double height = std::sqrt(d2[a][b]);
    if (height < previous * (1.0 - 1e-12)) tree.monotone = false;
    previous = std::max(previous, height);
    tree.merges.push_back({node[a], node[b], height});

    const double na = size[a];
    const double nb = size[b];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double nk = size[k];
      const double v = ((na + nk) * d2[a][k] + (nb + nk) * d2[b][k] - nk * d2[a][b]) / (na + nb + nk);
      d2[a][k] = d2[k][a] = std::max(v, 0.0);
    }
    active[b] = false;
    size[a] = na + nb;
    node[a] = n + step;

    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (i == a || nn[i] == a || nn[i] == b) {
        refresh(i);
      } else if (i < a && (d2[i][a] < nn_d[i] || (d2[i][a] == nn_d[i] && a < nn[i]))) {
        nn_d[i] = d2[i][a];
        nn[i] = a;
      }
    }
  }
  return tree;
}

HCTree hcluster_ward(const FeatureTable& table, const std::vector<std::string>& columns, bool standardize) {
  CompleteRows s = complete_rows(table, columns);
  if (standardize && !s.points.empty()) {
    const Scaling scaling = column_scaling(s.points);
    for (auto& p : s.points)
      for (std::size_t d = 0; d < p.size(); ++d) p[d] = (p[d] - scaling.means[d]) / scaling.scales[d];
  }
  std::vector<std::string> leaves;
  for (std::size_t r : s.rows) leaves.push_back(table.unit_ids[r]);
  std::vector<std::string> excluded;
  std::size_t next = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (next < s.rows.size() && s.rows[next] == r) {
      ++next;
    } else {
      excluded.push_back(table.unit_ids[r]);
    }
  }
  HCTree tree = ward_linkage(s.points, std::move(leaves));
  tree.excluded = std::move(excluded);
  return tree;
}

void write_tree(std::ostream& out, const HCTree& tree) {
  out << "node_id,left_child,right_child,height\n";
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    const auto& m = tree.merges[i];
    out << tree.leaf_count() + i << ',' << m.left << ',' << m.right << ',' << detail::format_double(m.height)
        << '\n';
  }
}

LeafCodes leaf_codes(const HCTree& tree) {
  const std::size_t n = tree.leaf_count();
  if (n < 2 || tree.merges.size() != n - 1) throw ComputationError("invalid tree");
  LeafCodes out;
  out.codes.assign(n, "");
  struct Frame {
    std::size_t node;
    std::string prefix;
  };
  std::vector<Frame> stack = {{tree.root(), ""}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.node < n) {
      out.codes[f.node] = f.prefix;
      out.order.push_back(f.node);
      continue;
    }
    const Merge& m = tree.merges[f.node - n];
    stack.push_back({m.right, f.prefix + '1'});
    stack.push_back({m.left, f.prefix + '0'});
  }
  out.similarity.assign(n, std::vector<int>(n, 0));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u; v < n; ++v) {
      const auto& a = out.codes[u];
      const auto& b = out.codes[v];
      const auto mismatch = std::mismatch(a.begin(), a.end(), b.begin(), b.end());
      const int common = static_cast<int>(mismatch.first - a.begin());
      out.similarity[u][v] = out.similarity[v][u] = common;
    }
  }
  return out;
}

void write_codes_csv(std::ostream& out, const HCTree& tree, const LeafCodes& codes) {
  out << "leaf,unit_id,code\n";
  for (std::size_t leaf : codes.order) out << leaf << ',' << tree.leaves[leaf] << ',' << codes.codes[leaf] << '\n';
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Heatmap similarity_heatmap(const LeafCodes& codes, const HCTree& tree) {
  const std::size_t n = codes.order.size();
  if (n != tree.leaf_count()) throw ComputationError("leaf codes do not belong to this tree");
  Heatmap h;
  for (std::size_t leaf : codes.order) h.labels.push_back(tree.leaves[leaf]);

  std::ostringstream csv;
  csv << "unit_id";
  for (const auto& l : h.labels) csv << ',' << l;
  csv << '\n';
  int max_s = 1;
  for (std::size_t u : codes.order) {
    csv << tree.leaves[u];
    for (std::size_t v : codes.order) {
      csv << ',' << codes.similarity[u][v];
      max_s = std::max(max_s, codes.similarity[u][v]);
    }
    csv << '\n';
  }
  h.csv = csv.str();

  constexpr int cell = 12;
  constexpr int margin = 90;
  const int side = margin + static_cast<int>(n) * cell + 10;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
      << "\" font-family=\"monospace\" font-size=\"9\">\n";
  svg << "<rect width=\"" << side << "\" height=\"" << side << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const int pos = margin + static_cast<int>(i) * cell;
    const std::string label = xml_escape(h.labels[i]);
    svg << "<text x=\"" << margin - 4 << "\" y=\"" << pos + cell - 3 << "\" text-anchor=\"end\">" << label
        << "</text>\n";
    svg << "<text transform=\"translate(" << pos + cell - 3 << "," << margin - 4
        << ") rotate(-90)\" text-anchor=\"start\">" << label << "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = static_cast<double>(codes.similarity[codes.order[i]][codes.order[j]]) / max_s;
      const auto shade = [t](int lo) { return static_cast<int>(std::lround(255.0 - t * (255.0 - lo))); };
      svg << "<rect x=\"" << margin + static_cast<int>(j) * cell << "\" y=\"" << margin + static_cast<int>(i) * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade(8) << ',' << shade(48)
          << ',' << shade(107) << ")\"/>\n";
    }
  }
  svg << "</svg>\n";
  h.svg = svg.str();
  return h;
}

}  // namespace epicurve
